#include <filesystem>

#include "ideoaudit/dataset_synth.hpp"

namespace ideoaudit::synth {

std::string_view to_string(JobState s) {
  switch (s) {
    case JobState::queued: return "queued";
    case JobState::running: return "running";
    case JobState::succeeded: return "succeeded";
    case JobState::failed: return "failed";
  }
  return "failed";
}

JobState map_provider_status(std::string_view status) {
  if (status == "validating_files" || status == "queued" || status == "pending") return JobState::queued;
  if (status == "running") return JobState::running;
  if (status == "succeeded") return JobState::succeeded;
  return JobState::failed;  // failed, cancelled, anything unknown
}

bool FinetuneClient::mock() const {
  const auto mode = gw_.config().mode;
  return mode == gateway::Mode::scripted || mode == gateway::Mode::replay;
}

namespace {

Json parse_body(const gateway::HttpResponse& r, std::string_view what) {
  if (r.status < 200 || r.status >= 300) {
    throw TransportError(std::string(what) + " failed with HTTP " + std::to_string(r.status) + ": " +
                         r.body.substr(0, 200));
  }
  try {
    return Json::parse(r.body);
  } catch (const Json::exception& e) {
    throw TransportError(std::string(what) + " returned malformed JSON: " + e.what());
  }
}

}  // namespace

std::string FinetuneClient::submit(const std::string& jsonl_path, const std::string& base_model) {
  if (!std::filesystem::exists(jsonl_path)) throw ConfigError("dataset not found: " + jsonl_path);
  const std::string bytes = read_file(jsonl_path);
  parse_jsonl(bytes);

  if (mock()) {
    std::lock_guard lock(mu_);
    std::string id = "ftjob-mock-" + std::to_string(mock_polls_.size() + 1);
    mock_polls_[id] = 0;
    return id;
  }

  auto& http = gw_.transport();
  const std::string filename = std::filesystem::path(jsonl_path).filename().string();
  const Json file = parse_body(http.post_multipart("/files", {{"purpose", "fine-tune", "", ""},
                                                              {"file", bytes, filename, "application/jsonl"}}),
                               "file upload");
  const Json body = {{"training_file", file.at("id").get<std::string>()}, {"model", base_model}};
  const Json job = parse_body(http.post_json("/fine_tuning/jobs", body.dump()), "fine-tune job creation");
  return job.at("id").get<std::string>();
}

JobStatus FinetuneClient::poll(const std::string& job_id) {
  if (mock()) {
    std::lock_guard lock(mu_);
    auto it = mock_polls_.find(job_id);
    if (it == mock_polls_.end()) throw Error("unknown mock job " + job_id);
    switch (it->second++) {
      case 0: return {JobState::queued, ""};
      case 1: return {JobState::running, ""};
      default: return {JobState::succeeded, "ft:mock"};
    }
  }

  const Json job = parse_body(gw_.transport().get("/fine_tuning/jobs/" + job_id), "fine-tune job poll");
  JobStatus st;
  st.state = map_provider_status(job.value("status", std::string("failed")));
  if (st.state == JobState::succeeded && job.contains("fine_tuned_model") && job["fine_tuned_model"].is_string()) {
    st.detail = job["fine_tuned_model"].get<std::string>();
  } else if (st.state == JobState::failed) {
    st.detail = job.value("status", std::string("failed"));
    if (job.contains("error") && job["error"].is_object() && job["error"].contains("message") &&
        job["error"]["message"].is_string()) {
      st.detail = job["error"]["message"].get<std::string>();
    }
  }
  return st;
}

}  // namespace ideoaudit::synth
