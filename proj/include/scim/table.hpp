#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace scim {

/// Dense row-major 2-D array. Rows are products, columns are supply-chain nodes.
template <typename T>
class Table {
 public:
  Table() = default;
  Table(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  T& operator()(std::size_t r, std::size_t c) {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }
  const T& operator()(std::size_t r, std::size_t c) const {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }

  std::span<T> flat() noexcept { return data_; }
  std::span<const T> flat() const noexcept { return data_; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  bool operator==(const Table&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

}  // namespace scim
