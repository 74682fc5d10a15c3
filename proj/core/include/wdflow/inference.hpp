#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "wdflow/corpus.hpp"
#include "wdflow/evaluation.hpp"
#include "wdflow/taskcast.hpp"

namespace wdflow {

struct GenRequest {
  std::vector<std::string> ids;
  std::vector<std::string> inputs;
  int max_new_units = 256;
};

struct GenStats {
  std::size_t wire_calls = 0;
  std::size_t retries = 0;
};

struct GenResponse {
  std::vector<std::string> ids;
  std::vector<std::string> outputs;
  GenStats stats;
};

class GenerationBackend {
 public:
  virtual ~GenerationBackend() = default;
  virtual std::string name() const = 0;
  // Outputs are aligned with req.ids regardless of completion order.
  virtual GenResponse generate(const GenRequest& req) = 0;
};

struct HttpLimits {
  std::size_t batch_size = 8;
  std::size_t max_in_flight = 2;
  std::chrono::milliseconds timeout{120000};
  int retries = 2;
  std::chrono::milliseconds backoff{100};  // doubled after every failed attempt
};

// POST <endpoint>/generate {"ids","inputs","max_new_units"} -> {"ids","outputs"}.
class HttpBackend final : public GenerationBackend {
 public:
  HttpBackend(std::string endpoint, HttpLimits limits = {});
  std::string name() const override { return "http:" + endpoint_; }
  GenResponse generate(const GenRequest& req) override;

 private:
  std::string endpoint_;
  HttpLimits limits_;
};

// Returns gold targets verbatim.
class OracleBackend final : public GenerationBackend {
 public:
  explicit OracleBackend(std::unordered_map<std::string, std::string> targets) : targets_(std::move(targets)) {}
  static OracleBackend from_samples(const std::vector<CastSample>& samples);
  std::string name() const override { return "oracle"; }
  GenResponse generate(const GenRequest& req) override;

 private:
  std::unordered_map<std::string, std::string> targets_;
};

// Replays archived predictions ({"id", "prediction"} JSONL).
class ReplayBackend final : public GenerationBackend {
 public:
  explicit ReplayBackend(const std::filesystem::path& path);
  std::string name() const override { return "replay:" + path_.string(); }
  GenResponse generate(const GenRequest& req) override;
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::filesystem::path path_;
  std::unordered_map<std::string, std::string> predictions_;
  std::vector<Diagnostic> diagnostics_;
};

GenResponse generate_http(const std::string& endpoint, const GenRequest& req, const HttpLimits& limits = {});
GenResponse generate_oracle(const std::unordered_map<std::string, std::string>& targets, const GenRequest& req);
GenResponse generate_replay(const std::filesystem::path& predictions_file, const GenRequest& req);

// Duplicate ids: last line wins, with a diagnostic per overwritten line.
std::vector<Prediction> read_predictions_jsonl(const std::filesystem::path& path,
                                               std::vector<Diagnostic>* diagnostics = nullptr);
void write_predictions_jsonl(const std::vector<Prediction>& predictions, const std::filesystem::path& path);

GenRequest make_request(const std::vector<CastSample>& samples, int max_new_units = 256);
std::vector<Prediction> to_predictions(const GenResponse& response);

}  // namespace wdflow
