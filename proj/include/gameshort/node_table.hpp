#ifndef GAMESHORT_NODE_TABLE_HPP
#define GAMESHORT_NODE_TABLE_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace gameshort {

/// Triangular storage for per-node quantities of a recombining lattice.
/// Level k holds k + 1 entries, indexed by the number of up moves j.
template <typename T>
class NodeTable {
public:
    NodeTable() = default;
    explicit NodeTable(std::size_t steps, const T& init = T{})
        : steps_(steps), data_(offset(steps + 1), init) {}

    std::size_t steps() const { return steps_; }
    bool empty() const { return data_.empty(); }

    T& operator()(std::size_t k, std::size_t j) { return data_[offset(k) + j]; }
    const T& operator()(std::size_t k, std::size_t j) const { return data_[offset(k) + j]; }

    std::span<T> level(std::size_t k) { return {data_.data() + offset(k), k + 1}; }
    std::span<const T> level(std::size_t k) const { return {data_.data() + offset(k), k + 1}; }

private:
    static constexpr std::size_t offset(std::size_t k) { return k * (k + 1) / 2; }

    std::size_t steps_ = 0;
    std::vector<T> data_;
};

}  // namespace gameshort

#endif  // GAMESHORT_NODE_TABLE_HPP
