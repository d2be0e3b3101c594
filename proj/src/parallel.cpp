#include "aoc/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace aoc {

unsigned worker_count()
{
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("AOC_THREADS"))
  {
    try
    {
      const long v = std::stol(env);
      if (v >= 1)
        n = static_cast<unsigned>(v);
    }
    catch (const std::exception&)
    {
      // Ignore malformed values.
    }
  }
  return n;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body)
{
  const std::size_t workers = std::min<std::size_t>(worker_count(), count);
  if (workers <= 1)
  {
    for (std::size_t i = 0; i < count; ++i)
      body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto run = [&]() {
    for (std::size_t i = next++; i < count; i = next++)
    {
      try
      {
        body(i);
      }
      catch (...)
      {
        std::lock_guard lock(error_mutex);
        if (!first_error)
          first_error = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w)
      pool.emplace_back(run);
    run();
  }
  if (first_error)
    std::rethrow_exception(first_error);
}

}  // namespace aoc
