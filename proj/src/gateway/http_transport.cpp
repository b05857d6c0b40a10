#include "httplib.h"

#include <cstdlib>

#include "ideoaudit/errors.hpp"
#include "ideoaudit/llm_gateway.hpp"

namespace ideoaudit::gateway {

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path prefix without trailing slash
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint_url needs a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  SplitUrl out;
  out.origin = url.substr(0, path_start);
  if (path_start != std::string::npos) out.prefix = url.substr(path_start);
  while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
  return out;
}

class HttplibTransport final : public HttpTransport {
 public:
  HttplibTransport(const std::string& base_url, std::string api_key, int timeout_s)
      : url_(split_url(base_url)), api_key_(std::move(api_key)), timeout_s_(timeout_s) {}

  HttpResponse post_json(const std::string& path, const std::string& body) override {
    auto cli = client();
    return unwrap(cli->Post(url_.prefix + path, headers(), body, "application/json"));
  }

  HttpResponse post_multipart(const std::string& path, const std::vector<MultipartField>& fields) override {
    httplib::MultipartFormDataItems items;
    for (const auto& f : fields) items.push_back({f.name, f.content, f.filename, f.content_type});
    auto cli = client();
    return unwrap(cli->Post(url_.prefix + path, headers(), items));
  }

  HttpResponse get(const std::string& path) override {
    auto cli = client();
    return unwrap(cli->Get(url_.prefix + path, headers()));
  }

 private:
  // One client per request; httplib clients are not meant to be shared
  // across concurrent callers.
  std::unique_ptr<httplib::Client> client() const {
    auto cli = std::make_unique<httplib::Client>(url_.origin);
    cli->set_connection_timeout(timeout_s_, 0);
    cli->set_read_timeout(timeout_s_, 0);
    cli->set_write_timeout(timeout_s_, 0);
    return cli;
  }

  httplib::Headers headers() const {
    httplib::Headers h;
    if (!api_key_.empty()) h.emplace("Authorization", "Bearer " + api_key_);
    return h;
  }

  static HttpResponse unwrap(const httplib::Result& res) {
    if (!res) throw TransportError("HTTP request failed: " + httplib::to_string(res.error()));
    return {res->status, res->body};
  }

  SplitUrl url_;
  std::string api_key_;
  int timeout_s_;
};

}  // namespace

std::shared_ptr<HttpTransport> make_http_transport(const std::string& base_url, std::string api_key, int timeout_s) {
  return std::make_shared<HttplibTransport>(base_url, std::move(api_key), timeout_s);
}

std::shared_ptr<HttpTransport> make_live_transport(const BackendConfig& cfg) {
  const char* key = std::getenv(cfg.api_key_env_var.c_str());
  if (key == nullptr || *key == '\0') {
    throw ConfigError("environment variable " + cfg.api_key_env_var + " is not set");
  }
  return make_http_transport(cfg.endpoint_url, key, cfg.timeout_s);
}

}  // namespace ideoaudit::gateway
