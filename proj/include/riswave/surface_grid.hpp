#ifndef RISWAVE_SURFACE_GRID_HPP
#define RISWAVE_SURFACE_GRID_HPP

#include <cstddef>
#include <functional>
#include <vector>

#include "riswave/em_model.hpp"
#include "riswave/geometry.hpp"

namespace riswave {

/// Midpoint-rule sampling of the plate. Nodes sit strictly inside the
/// aperture at cell centers; every cell has the same area dA. Node counts per
/// axis are ceil(length/lambda * samples_per_wavelength), at least 2.
class SurfaceGrid {
  public:
    SurfaceGrid(const RisAperture& aperture, const Medium& medium,
                double samples_per_wavelength = 8.0);

    std::size_t count_x() const { return count_x_; }
    std::size_t count_y() const { return count_y_; }
    std::size_t count() const { return count_x_ * count_y_; }
    double cell_area() const { return cell_area_; }
    double samples_per_wavelength() const { return samples_per_wavelength_; }

    double node_x(std::size_t i) const { return x0_ + (static_cast<double>(i) + 0.5) * dx_; }
    double node_y(std::size_t j) const { return y0_ + (static_cast<double>(j) + 0.5) * dy_; }

    /// Full plate extents covered by the grid (b along x, a along y).
    double extent_x() const { return static_cast<double>(count_x_) * dx_; }
    double extent_y() const { return static_cast<double>(count_y_) * dy_; }

    /// Node index layout is row-major: node = j * count_x + i.
    double node_x_of(std::size_t node) const { return node_x(node % count_x_); }
    double node_y_of(std::size_t node) const { return node_y(node / count_x_); }

  private:
    std::size_t count_x_;
    std::size_t count_y_;
    double x0_, y0_, dx_, dy_;
    double cell_area_;
    double samples_per_wavelength_;
};

/// Overrides the worker-thread count used by the parallel loops (0 restores
/// the RISWAVE_THREADS / hardware default). Results never depend on it.
void set_max_threads(int count);
int max_threads();

/// Runs fn(begin, end) over [0, n) split into chunks, possibly on several
/// threads. Chunks must write disjoint state.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

namespace detail {
inline constexpr std::size_t reduction_leaf_size = 64;
inline constexpr std::size_t reduction_subtrees = 64;
} // namespace detail

/// Deterministic pairwise (tree) reduction of fn(i) over [0, n).
///
/// The tree shape is fixed by n alone: ranges halve recursively down to
/// leaves of `reduction_leaf_size` summed left to right. The top
/// `reduction_subtrees` subtrees may be evaluated concurrently, but they are
/// always combined in index order, so the result is bitwise identical for
/// any thread count. V needs zero-init "V(m)" semantics via the supplied
/// identity value and operator+=.
template <typename V, typename Fn>
V pairwise_reduce(std::size_t n, const V& identity, Fn&& fn);

namespace detail {

template <typename V, typename Fn>
V reduce_range(std::size_t begin, std::size_t end, const V& identity, const Fn& fn) {
    if (end - begin <= reduction_leaf_size) {
        V acc = identity;
        for (std::size_t i = begin; i < end; ++i) acc += fn(i);
        return acc;
    }
    const std::size_t mid = begin + (end - begin) / 2;
    V left = reduce_range(begin, mid, identity, fn);
    V right = reduce_range(mid, end, identity, fn);
    left += right;
    return left;
}

} // namespace detail

template <typename V, typename Fn>
V pairwise_reduce(std::size_t n, const V& identity, Fn&& fn) {
    if (n == 0) return identity;
    // Fixed split into subtrees; boundaries follow the same halving pattern
    // as reduce_range so the overall tree is identical to a serial run.
    const std::size_t subtrees =
        n <= detail::reduction_leaf_size ? 1 : detail::reduction_subtrees;
    std::vector<std::size_t> bounds;
    bounds.push_back(0);
    std::function<void(std::size_t, std::size_t, std::size_t)> split =
        [&](std::size_t begin, std::size_t end, std::size_t parts) {
            if (parts == 1 || end - begin <= detail::reduction_leaf_size) {
                bounds.push_back(end);
                return;
            }
            const std::size_t mid = begin + (end - begin) / 2;
            split(begin, mid, parts / 2);
            split(mid, end, parts / 2);
        };
    split(0, n, subtrees);

    std::vector<V> partials(bounds.size() - 1, identity);
    parallel_for(bounds.size() - 1, [&](std::size_t chunk_begin, std::size_t chunk_end) {
        for (std::size_t c = chunk_begin; c < chunk_end; ++c)
            partials[c] = detail::reduce_range(bounds[c], bounds[c + 1], identity, fn);
    });

    // Combine partials pairwise in index order.
    while (partials.size() > 1) {
        std::vector<V> next;
        next.reserve((partials.size() + 1) / 2);
        for (std::size_t i = 0; i + 1 < partials.size(); i += 2) {
            partials[i] += partials[i + 1];
            next.push_back(std::move(partials[i]));
        }
        if (partials.size() % 2 == 1) next.push_back(std::move(partials.back()));
        partials = std::move(next);
    }
    return partials.front();
}

} // namespace riswave

#endif
