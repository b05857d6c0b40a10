#include "ideoaudit/canonical_json.hpp"

#include <openssl/evp.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "ideoaudit/errors.hpp"

namespace ideoaudit {

namespace {

void dump_into(const Json& v, std::string& out) {
  switch (v.type()) {
    case Json::value_t::object: {
      // nlohmann::json stores objects in a std::map, so iteration is already
      // sorted by key bytes.
      out.push_back('{');
      bool first = true;
      for (const auto& [key, child] : v.items()) {
        if (!first) out.push_back(',');
        first = false;
        out += Json(key).dump();
        out.push_back(':');
        dump_into(child, out);
      }
      out.push_back('}');
      break;
    }
    case Json::value_t::array: {
      out.push_back('[');
      bool first = true;
      for (const auto& child : v) {
        if (!first) out.push_back(',');
        first = false;
        dump_into(child, out);
      }
      out.push_back(']');
      break;
    }
    case Json::value_t::number_float: {
      const double d = v.get<double>();
      if (!std::isfinite(d)) throw Error("canonical JSON cannot encode non-finite numbers");
      if (d == std::trunc(d) && std::fabs(d) < 9.0e15) {
        out += std::to_string(static_cast<std::int64_t>(d));
      } else {
        out += v.dump();
      }
      break;
    }
    default:
      out += v.dump(-1, ' ', false, Json::error_handler_t::strict);
  }
}

}  // namespace

std::string canonical_dump(const Json& value) {
  std::string out;
  dump_into(value, out);
  return out;
}

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[md[i] >> 4]);
    hex.push_back(kHex[md[i] & 0x0f]);
  }
  return hex;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view bytes, bool exclusive) {
  namespace fs = std::filesystem;
  const fs::path p(path);
  if (exclusive && fs::exists(p)) throw ArtifactExists("refusing to overwrite " + path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for " + path);
}

}  // namespace ideoaudit
