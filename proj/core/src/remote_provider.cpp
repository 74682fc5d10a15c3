#include <map>
#include <mutex>
#include <set>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "http_util.hpp"
#include "wdflow/error.hpp"
#include "wdflow/stepmatch.hpp"

namespace wdflow {

namespace {

using Pair = std::pair<std::string, std::string>;

class RemoteProvider final : public SimilarityProvider {
 public:
  RemoteProvider(std::string endpoint, RemoteProviderOptions opts)
      : url_(std::move(endpoint)), endpoint_(detail::parse_endpoint(url_)), opts_(opts) {
    if (opts_.batch_size == 0) opts_.batch_size = 1;
  }

  std::string name() const override { return "remote:" + url_; }

  double score(std::string_view a, std::string_view b) const override {
    Pair key{std::string(a), std::string(b)};
    {
      std::lock_guard lock(mutex_);
      if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    const auto scores = request({key});
    std::lock_guard lock(mutex_);
    cache_[key] = scores.front();
    return scores.front();
  }

  void prime(std::span<const Pair> pairs) const override {
    std::vector<Pair> todo;
    {
      std::lock_guard lock(mutex_);
      std::set<Pair> seen;
      for (const auto& p : pairs)
        if (!cache_.count(p) && seen.insert(p).second) todo.push_back(p);
    }
    const auto n_batches = (todo.size() + opts_.batch_size - 1) / opts_.batch_size;
    detail::run_bounded(n_batches, opts_.max_in_flight, [&](std::size_t b) {
      const auto begin = b * opts_.batch_size;
      const auto end = std::min(todo.size(), begin + opts_.batch_size);
      std::vector<Pair> batch(todo.begin() + static_cast<std::ptrdiff_t>(begin), todo.begin() + static_cast<std::ptrdiff_t>(end));
      const auto scores = request(batch);
      std::lock_guard lock(mutex_);
      for (std::size_t i = 0; i < batch.size(); ++i) cache_[batch[i]] = scores[i];
    });
  }

 private:
  std::vector<double> request(const std::vector<Pair>& batch) const {
    nlohmann::json body = {{"texts_a", nlohmann::json::array()}, {"texts_b", nlohmann::json::array()}};
    for (const auto& [a, b] : batch) {
      body["texts_a"].push_back(a);
      body["texts_b"].push_back(b);
    }
    httplib::Client client(endpoint_.origin);
    const auto secs = opts_.timeout.count() / 1000;
    const auto usecs = (opts_.timeout.count() % 1000) * 1000;
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    auto res = client.Post(endpoint_.base_path + "/score", body.dump(), "application/json");
    if (!res) throw Error(ErrorCode::kProviderUnavailable, url_ + ": " + httplib::to_string(res.error()));
    if (res->status != 200)
      throw Error(ErrorCode::kProviderUnavailable, url_ + ": HTTP " + std::to_string(res->status));

    nlohmann::json reply;
    try {
      reply = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::parse_error&) {
      throw Error(ErrorCode::kMalformedResponse, url_ + ": body is not JSON");
    }
    auto it = reply.find("scores");
    if (it == reply.end() || !it->is_array() || it->size() != batch.size())
      throw Error(ErrorCode::kMalformedResponse, url_ + ": expected " + std::to_string(batch.size()) + " scores");
    std::vector<double> out;
    for (const auto& s : *it) {
      if (!s.is_number()) throw Error(ErrorCode::kMalformedResponse, url_ + ": non-numeric score");
      const double v = s.get<double>();
      if (v < -1e-6 || v > 1.0 + 1e-6) throw Error(ErrorCode::kMalformedResponse, url_ + ": score out of [0,1]");
      out.push_back(std::clamp(v, 0.0, 1.0));
    }
    return out;
  }

  std::string url_;
  detail::Endpoint endpoint_;
  RemoteProviderOptions opts_;
  mutable std::mutex mutex_;
  mutable std::map<Pair, double> cache_;
};

}  // namespace

std::shared_ptr<const SimilarityProvider> remote_provider(std::string endpoint, RemoteProviderOptions opts) {
  return std::make_shared<const RemoteProvider>(std::move(endpoint), opts);
}

}  // namespace wdflow
