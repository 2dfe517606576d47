#include "sieve/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace sieve {

int worker_count() {
    if (const char* env = std::getenv("SIEVE_WORKERS")) {
        try {
            std::size_t used = 0;
            int v = std::stoi(env, &used);
            if (used == std::string(env).size() && v > 0) return v;
        } catch (const std::exception&) {
        }
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, int workers) {
    if (n == 0) return;
    int w = workers > 0 ? workers : worker_count();
    w = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(w), n));
    std::vector<std::exception_ptr> errors(n);
    if (w <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(w));
        for (int t = 0; t < w; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        body(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace sieve
