#ifndef CCL_TENSOR_HPP
#define CCL_TENSOR_HPP

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <string>

#include "ccl/errors.hpp"

namespace ccl {

// Dense rank-1..3 tensor over a contiguous row-major buffer. Rank 3 is
// (batch, channels, length); rank 2 is (batch, features). Heavy math goes
// through the Eigen map views below.
template <typename S>
struct Tensor {
  using Scalar = S;
  using Buffer = Eigen::Array<S, Eigen::Dynamic, 1>;
  using MatrixMap =
      Eigen::Map<Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
  using ConstMatrixMap = Eigen::Map<
      const Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

  int rank = 0;
  std::array<Eigen::Index, 3> dims{0, 0, 0};
  Buffer data;

  Tensor() = default;

  static Tensor zeros1(Eigen::Index a) { return shaped(1, {a, 1, 1}); }
  static Tensor zeros2(Eigen::Index a, Eigen::Index b) {
    return shaped(2, {a, b, 1});
  }
  static Tensor zeros3(Eigen::Index a, Eigen::Index b, Eigen::Index c) {
    return shaped(3, {a, b, c});
  }
  static Tensor zeros_like(const Tensor& t) {
    Tensor out = t;
    out.data.setZero();
    return out;
  }

  Eigen::Index size() const { return data.size(); }

  S& operator()(Eigen::Index i) { return data[i]; }
  S operator()(Eigen::Index i) const { return data[i]; }
  S& operator()(Eigen::Index i, Eigen::Index j) { return data[i * dims[1] + j]; }
  S operator()(Eigen::Index i, Eigen::Index j) const {
    return data[i * dims[1] + j];
  }
  S& operator()(Eigen::Index i, Eigen::Index j, Eigen::Index k) {
    return data[(i * dims[1] + j) * dims[2] + k];
  }
  S operator()(Eigen::Index i, Eigen::Index j, Eigen::Index k) const {
    return data[(i * dims[1] + j) * dims[2] + k];
  }

  // View the buffer as a rows x cols row-major matrix.
  MatrixMap mat(Eigen::Index rows, Eigen::Index cols) {
    return MatrixMap(data.data(), rows, cols);
  }
  ConstMatrixMap mat(Eigen::Index rows, Eigen::Index cols) const {
    return ConstMatrixMap(data.data(), rows, cols);
  }

  bool same_shape(const Tensor& o) const {
    return rank == o.rank && dims == o.dims;
  }

  std::string shape_str() const {
    std::string s = "[";
    for (int i = 0; i < rank; ++i)
      s += (i ? "," : "") + std::to_string(dims[i]);
    return s + "]";
  }

  template <typename T>
  Tensor<T> cast() const {
    Tensor<T> out;
    out.rank = rank;
    out.dims = dims;
    out.data = data.template cast<T>();
    return out;
  }

 private:
  static Tensor shaped(int rank, std::array<Eigen::Index, 3> dims) {
    Tensor t;
    t.rank = rank;
    t.dims = dims;
    Eigen::Index n = 1;
    for (int i = 0; i < rank; ++i) {
      if (dims[i] <= 0) throw ShapeMismatch("non-positive tensor dim");
      n *= dims[i];
    }
    t.data = Buffer::Zero(n);
    return t;
  }
};

}  // namespace ccl

#endif  // CCL_TENSOR_HPP
