#include "wdflow/inference.hpp"

#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "http_util.hpp"
#include "json_util.hpp"
#include "wdflow/error.hpp"

namespace wdflow {

using nlohmann::json;

namespace {

void check_request(const GenRequest& req) {
  if (req.ids.size() != req.inputs.size())
    throw Error(ErrorCode::kInvalidConfig, "request has " + std::to_string(req.ids.size()) + " ids but " +
                                               std::to_string(req.inputs.size()) + " inputs");
}

enum class Attempt { kOk, kRetryable };

}  // namespace

HttpBackend::HttpBackend(std::string endpoint, HttpLimits limits) : endpoint_(std::move(endpoint)), limits_(limits) {
  detail::parse_endpoint(endpoint_);
  if (limits_.batch_size == 0) limits_.batch_size = 1;
  if (limits_.max_in_flight == 0) limits_.max_in_flight = 1;
}

GenResponse HttpBackend::generate(const GenRequest& req) {
  check_request(req);
  const auto ep = detail::parse_endpoint(endpoint_);
  GenResponse resp;
  resp.ids = req.ids;
  resp.outputs.resize(req.ids.size());
  const auto n_batches = (req.ids.size() + limits_.batch_size - 1) / limits_.batch_size;
  std::mutex stats_mutex;

  detail::run_bounded(n_batches, limits_.max_in_flight, [&](std::size_t b) {
    const auto begin = b * limits_.batch_size;
    const auto end = std::min(req.ids.size(), begin + limits_.batch_size);
    json body = {{"ids", json::array()}, {"inputs", json::array()}, {"max_new_units", req.max_new_units}};
    for (auto i = begin; i < end; ++i) {
      body["ids"].push_back(req.ids[i]);
      body["inputs"].push_back(req.inputs[i]);
    }
    const auto payload = body.dump();

    httplib::Client client(ep.origin);
    const auto secs = limits_.timeout.count() / 1000;
    const auto usecs = (limits_.timeout.count() % 1000) * 1000;
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);

    std::string last_error;
    auto delay = limits_.backoff;
    for (int attempt = 0; attempt <= limits_.retries; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(delay);
        delay *= 2;
      }
      auto res = client.Post(ep.base_path + "/generate", payload, "application/json");
      {
        std::lock_guard lock(stats_mutex);
        ++resp.stats.wire_calls;
        if (attempt > 0) ++resp.stats.retries;
      }
      if (!res) {
        last_error = httplib::to_string(res.error());
        continue;
      }
      if (res->status >= 500 || res->status == 408 || res->status == 429) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      if (res->status != 200)
        throw Error(ErrorCode::kMalformedResponse, endpoint_ + ": HTTP " + std::to_string(res->status) + " " + res->body);

      json reply;
      try {
        reply = json::parse(res->body);
      } catch (const json::parse_error&) {
        throw Error(ErrorCode::kMalformedResponse, endpoint_ + ": body is not JSON");
      }
      const auto outputs = reply.find("outputs");
      if (outputs == reply.end() || !outputs->is_array() || outputs->size() != end - begin)
        throw Error(ErrorCode::kMalformedResponse, endpoint_ + ": expected " + std::to_string(end - begin) + " outputs");
      // Realign by id when the server echoes them; otherwise trust position.
      std::vector<std::size_t> slot(end - begin);
      for (std::size_t k = 0; k < slot.size(); ++k) slot[k] = begin + k;
      if (auto ids = reply.find("ids"); ids != reply.end() && !ids->is_null()) {
        if (!ids->is_array() || ids->size() != end - begin)
          throw Error(ErrorCode::kMalformedResponse, endpoint_ + ": ids do not match the request");
        std::unordered_map<std::string, std::size_t> index;
        for (auto i = begin; i < end; ++i) index[req.ids[i]] = i;
        for (std::size_t k = 0; k < slot.size(); ++k) {
          const auto& id = (*ids)[k];
          auto it = id.is_string() ? index.find(id.get<std::string>()) : index.end();
          if (it == index.end()) throw Error(ErrorCode::kMalformedResponse, endpoint_ + ": unknown id in response");
          slot[k] = it->second;
          index.erase(it);
        }
      }
      for (std::size_t k = 0; k < slot.size(); ++k) {
        const auto& out = (*outputs)[k];
        if (!out.is_string()) throw Error(ErrorCode::kMalformedResponse, endpoint_ + ": non-string output");
        resp.outputs[slot[k]] = out.get<std::string>();
      }
      return;
    }
    throw Error(ErrorCode::kBackendTimeout, endpoint_ + ": batch " + std::to_string(b) + " failed after " +
                                                std::to_string(limits_.retries) + " retries (" + last_error + ")");
  });
  return resp;
}

OracleBackend OracleBackend::from_samples(const std::vector<CastSample>& samples) {
  std::unordered_map<std::string, std::string> targets;
  for (const auto& s : samples) targets[s.id] = s.target_text;
  return OracleBackend(std::move(targets));
}

GenResponse OracleBackend::generate(const GenRequest& req) { return generate_oracle(targets_, req); }

GenResponse generate_oracle(const std::unordered_map<std::string, std::string>& targets, const GenRequest& req) {
  check_request(req);
  GenResponse resp;
  resp.ids = req.ids;
  for (const auto& id : req.ids) {
    auto it = targets.find(id);
    if (it == targets.end()) throw Error(ErrorCode::kUnknownId, id);
    resp.outputs.push_back(it->second);
  }
  return resp;
}

ReplayBackend::ReplayBackend(const std::filesystem::path& path) : path_(path) {
  for (auto& p : read_predictions_jsonl(path, &diagnostics_)) predictions_[p.id] = std::move(p.text);
}

GenResponse ReplayBackend::generate(const GenRequest& req) {
  check_request(req);
  GenResponse resp;
  resp.ids = req.ids;
  for (const auto& id : req.ids) {
    auto it = predictions_.find(id);
    if (it == predictions_.end()) throw Error(ErrorCode::kMissingPrediction, "no prediction for id '" + id + "' in " + path_.string());
    resp.outputs.push_back(it->second);
  }
  return resp;
}

GenResponse generate_http(const std::string& endpoint, const GenRequest& req, const HttpLimits& limits) {
  return HttpBackend(endpoint, limits).generate(req);
}

GenResponse generate_replay(const std::filesystem::path& predictions_file, const GenRequest& req) {
  return ReplayBackend(predictions_file).generate(req);
}

std::vector<Prediction> read_predictions_jsonl(const std::filesystem::path& path, std::vector<Diagnostic>* diagnostics) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<Prediction> out;
  std::unordered_map<std::string, std::size_t> index;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = path.string() + ":" + std::to_string(lineno);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::kMalformedResponse, where + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j.contains("prediction") || !j["id"].is_string() ||
        !j["prediction"].is_string())
      throw Error(ErrorCode::kMalformedResponse, where + ": expected {\"id\", \"prediction\"} strings");
    Prediction p{j["id"].get<std::string>(), j["prediction"].get<std::string>()};
    if (auto it = index.find(p.id); it != index.end()) {
      if (diagnostics) diagnostics->push_back({where, "duplicate_id", "id '" + p.id + "' repeated; last line wins"});
      out[it->second].text = std::move(p.text);
      continue;
    }
    index[p.id] = out.size();
    out.push_back(std::move(p));
  }
  return out;
}

void write_predictions_jsonl(const std::vector<Prediction>& predictions, const std::filesystem::path& path) {
  std::ostringstream ss;
  for (const auto& p : predictions) {
    nlohmann::ordered_json j;
    j["id"] = p.id;
    j["prediction"] = p.text;
    ss << j.dump() << '\n';
  }
  detail::write_file(path, ss.str());
}

GenRequest make_request(const std::vector<CastSample>& samples, int max_new_units) {
  GenRequest req;
  req.max_new_units = max_new_units;
  for (const auto& s : samples) {
    req.ids.push_back(s.id);
    req.inputs.push_back(s.input_text);
  }
  return req;
}

std::vector<Prediction> to_predictions(const GenResponse& response) {
  std::vector<Prediction> out;
  for (std::size_t i = 0; i < response.ids.size(); ++i) out.push_back({response.ids[i], response.outputs[i]});
  return out;
}

}  // namespace wdflow
