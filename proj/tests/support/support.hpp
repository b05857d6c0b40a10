#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "ideoaudit/llm_gateway.hpp"

namespace httplib {
class Server;
}

namespace testsupport {

/// Fails loudly if anything tries to reach the network.
class PanicTransport : public ideoaudit::gateway::HttpTransport {
 public:
  ideoaudit::gateway::HttpResponse post_json(const std::string& path, const std::string&) override;
  ideoaudit::gateway::HttpResponse post_multipart(const std::string& path,
                                                  const std::vector<ideoaudit::gateway::MultipartField>&) override;
  ideoaudit::gateway::HttpResponse get(const std::string& path) override;

  std::atomic<int> calls{0};
};

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string str(const std::string& sub = {}) const { return (path_ / sub).string(); }

 private:
  std::filesystem::path path_;
};

/// A local OpenAI-compatible endpoint. Chat replies come from a script table;
/// usage is reported as whitespace-separated word counts. Also serves the
/// files and fine_tuning endpoints.
class FakeOpenAI {
 public:
  explicit FakeOpenAI(ideoaudit::gateway::ScriptTable script);
  ~FakeOpenAI();
  FakeOpenAI(const FakeOpenAI&) = delete;
  FakeOpenAI& operator=(const FakeOpenAI&) = delete;

  /// e.g. http://127.0.0.1:41234/v1
  std::string base_url() const;

  /// The next `n` chat requests answer with HTTP `status`.
  void fail_next(int n, int status);

  int chat_requests() const { return chat_requests_.load(); }
  std::string last_authorization() const;
  std::vector<std::string> uploaded_files() const;
  /// Request bodies seen by /chat/completions, in arrival order.
  std::vector<std::string> chat_bodies() const;

 private:
  ideoaudit::gateway::ScriptTable script_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> chat_requests_{0};
  mutable std::mutex mu_;
  int fail_remaining_ = 0;
  int fail_status_ = 500;
  std::string last_auth_;
  std::vector<std::string> uploads_;
  std::vector<std::string> bodies_;
  std::map<std::string, int> job_polls_;
};

std::string fixture(const std::string& rel);
std::string data_file(const std::string& rel);

/// Word count used by FakeOpenAI for usage.
std::int64_t word_count(const std::string& s);

}  // namespace testsupport
