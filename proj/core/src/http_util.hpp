#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "wdflow/error.hpp"

namespace wdflow::detail {

struct Endpoint {
  std::string origin;     // scheme://host[:port]
  std::string base_path;  // no trailing slash, may be empty
};

inline Endpoint parse_endpoint(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos || url.compare(0, scheme, "http") != 0)
    throw Error(ErrorCode::kInvalidConfig, "endpoint must be an http:// URL: '" + url + "'");
  const auto path = url.find('/', scheme + 3);
  Endpoint ep;
  ep.origin = url.substr(0, path);
  if (path != std::string::npos) ep.base_path = url.substr(path);
  while (!ep.base_path.empty() && ep.base_path.back() == '/') ep.base_path.pop_back();
  if (ep.origin.size() <= scheme + 3) throw Error(ErrorCode::kInvalidConfig, "endpoint has no host: '" + url + "'");
  return ep;
}

// Runs task(i) for i in [0, n) on at most `max_in_flight` threads. The first
// exception thrown by any task is rethrown after all workers stop.
inline void run_bounded(std::size_t n, std::size_t max_in_flight, const std::function<void(std::size_t)>& task) {
  if (n == 0) return;
  const auto workers = std::max<std::size_t>(1, std::min(n, max_in_flight));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n && !failed; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          failed = true;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace wdflow::detail
