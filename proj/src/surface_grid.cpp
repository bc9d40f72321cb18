#include "riswave/surface_grid.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace riswave {

SurfaceGrid::SurfaceGrid(const RisAperture& aperture, const Medium& medium,
                         double samples_per_wavelength)
    : samples_per_wavelength_(samples_per_wavelength) {
    if (!(samples_per_wavelength > 0.0))
        throw std::invalid_argument("SurfaceGrid: samples_per_wavelength must be > 0");
    const double per_meter = samples_per_wavelength / medium.wavelength();
    count_x_ = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::ceil(aperture.length_x() * per_meter)));
    count_y_ = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::ceil(aperture.length_y() * per_meter)));
    x0_ = -0.5 * aperture.length_x();
    y0_ = -0.5 * aperture.length_y();
    dx_ = aperture.length_x() / static_cast<double>(count_x_);
    dy_ = aperture.length_y() / static_cast<double>(count_y_);
    cell_area_ = dx_ * dy_;
}

namespace {

int default_thread_count() {
    if (const char* env = std::getenv("RISWAVE_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return std::min(n, 256);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(std::min(hw, 16u));
}

std::atomic<int> g_thread_override{0};
thread_local bool tl_inside_parallel = false;

} // namespace

void set_max_threads(int count) { g_thread_override.store(count < 0 ? 0 : count); }

int max_threads() {
    const int v = g_thread_override.load();
    return v > 0 ? v : default_thread_count();
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    const int threads = tl_inside_parallel ? 1 : max_threads();
    if (threads <= 1 || n == 1) {
        fn(0, n);
        return;
    }
    const std::size_t chunks = std::min<std::size_t>(n, 4 * static_cast<std::size_t>(threads));
    const std::size_t chunk_size = (n + chunks - 1) / chunks;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        tl_inside_parallel = true;
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            const std::size_t begin = c * chunk_size;
            if (begin >= n) break;
            fn(begin, std::min(begin + chunk_size, n));
        }
        tl_inside_parallel = false;
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads) - 1);
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();
}

} // namespace riswave
