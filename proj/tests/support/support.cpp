#include "support.hpp"

#include <random>
#include <sstream>
#include <stdexcept>

#include "httplib.h"

namespace testsupport {

namespace fs = std::filesystem;
using ideoaudit::Json;
using ideoaudit::gateway::HttpResponse;

HttpResponse PanicTransport::post_json(const std::string& path, const std::string&) {
  ++calls;
  throw std::logic_error("network use in an offline mode: POST " + path);
}

HttpResponse PanicTransport::post_multipart(const std::string& path,
                                            const std::vector<ideoaudit::gateway::MultipartField>&) {
  ++calls;
  throw std::logic_error("network use in an offline mode: POST " + path);
}

HttpResponse PanicTransport::get(const std::string& path) {
  ++calls;
  throw std::logic_error("network use in an offline mode: GET " + path);
}

TempDir::TempDir() {
  std::random_device rd;
  for (;;) {
    path_ = fs::temp_directory_path() / ("ideoaudit-test-" + std::to_string(rd()));
    if (fs::create_directory(path_)) break;
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::int64_t word_count(const std::string& s) {
  std::istringstream in(s);
  std::int64_t n = 0;
  for (std::string w; in >> w;) ++n;
  return n;
}

FakeOpenAI::FakeOpenAI(ideoaudit::gateway::ScriptTable script)
    : script_(std::move(script)), server_(std::make_unique<httplib::Server>()) {
  server_->Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
    ++chat_requests_;
    {
      std::lock_guard lock(mu_);
      last_auth_ = req.get_header_value("Authorization");
      bodies_.push_back(req.body);
      if (fail_remaining_ > 0) {
        --fail_remaining_;
        res.status = fail_status_;
        res.set_content(R"({"error":{"message":"try again"}})", "application/json");
        return;
      }
    }
    const Json body = Json::parse(req.body);
    ideoaudit::gateway::ChatRequest chat;
    chat.model = body.at("model").get<std::string>();
    for (const Json& m : body.at("messages")) {
      chat.messages.push_back({ideoaudit::gateway::role_from_string(m.at("role").get<std::string>()),
                               m.at("content").get<std::string>()});
    }
    if (body.contains("seed")) chat.rng_seed = body["seed"].get<std::int64_t>();
    std::string content;
    try {
      content = script_.reply(chat);
    } catch (const std::exception& e) {
      res.status = 400;
      res.set_content(Json{{"error", {{"message", e.what()}}}}.dump(), "application/json");
      return;
    }
    std::int64_t prompt_words = 0;
    for (const auto& m : chat.messages) prompt_words += word_count(m.content);
    const Json reply = {
        {"id", "chatcmpl-fake"},
        {"object", "chat.completion"},
        {"model", chat.model},
        {"choices", Json::array({{{"index", 0},
                                  {"message", {{"role", "assistant"}, {"content", content}}},
                                  {"finish_reason", "stop"}}})},
        {"usage",
         {{"prompt_tokens", prompt_words},
          {"completion_tokens", word_count(content)},
          {"total_tokens", prompt_words + word_count(content)}}},
    };
    res.set_content(reply.dump(), "application/json");
  });

  server_->Post("/v1/files", [this](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(mu_);
    last_auth_ = req.get_header_value("Authorization");
    if (!req.has_file("file") || req.get_file_value("purpose").content != "fine-tune") {
      res.status = 400;
      res.set_content(R"({"error":{"message":"bad upload"}})", "application/json");
      return;
    }
    uploads_.push_back(req.get_file_value("file").content);
    res.set_content(Json{{"id", "file-" + std::to_string(uploads_.size())}}.dump(), "application/json");
  });

  server_->Post("/v1/fine_tuning/jobs", [this](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(mu_);
    const Json body = Json::parse(req.body);
    const std::string id = "ftjob-" + body.at("training_file").get<std::string>();
    job_polls_[id] = 0;
    res.set_content(Json{{"id", id}, {"status", "validating_files"}, {"model", body.at("model")}}.dump(),
                    "application/json");
  });

  server_->Get(R"(/v1/fine_tuning/jobs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(mu_);
    const std::string id = req.matches[1];
    auto it = job_polls_.find(id);
    if (it == job_polls_.end()) {
      res.status = 404;
      res.set_content(R"({"error":{"message":"no such job"}})", "application/json");
      return;
    }
    static const char* kStates[] = {"validating_files", "running", "succeeded"};
    const int n = std::min(it->second++, 2);
    Json job = {{"id", id}, {"status", kStates[n]}, {"fine_tuned_model", nullptr}};
    if (n == 2) job["fine_tuned_model"] = "ft:gpt-3.5-turbo:fake::" + id;
    res.set_content(job.dump(), "application/json");
  });

  port_ = server_->bind_to_any_port("127.0.0.1");
  if (port_ <= 0) throw std::runtime_error("fake server could not bind");
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

FakeOpenAI::~FakeOpenAI() {
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string FakeOpenAI::base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

void FakeOpenAI::fail_next(int n, int status) {
  std::lock_guard lock(mu_);
  fail_remaining_ = n;
  fail_status_ = status;
}

std::string FakeOpenAI::last_authorization() const {
  std::lock_guard lock(mu_);
  return last_auth_;
}

std::vector<std::string> FakeOpenAI::uploaded_files() const {
  std::lock_guard lock(mu_);
  return uploads_;
}

std::vector<std::string> FakeOpenAI::chat_bodies() const {
  std::lock_guard lock(mu_);
  return bodies_;
}

std::string fixture(const std::string& rel) { return std::string(IDEOAUDIT_FIXTURE_DIR) + "/" + rel; }
std::string data_file(const std::string& rel) { return std::string(IDEOAUDIT_DATA_DIR) + "/" + rel; }

}  // namespace testsupport
