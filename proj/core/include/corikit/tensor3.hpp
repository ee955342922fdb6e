#pragma once

#include <Eigen/Dense>

#include <vector>

namespace corikit {

/// Dense rank-3 array with dimensions (rows, cols, pages). Storage is
/// column-major within a page, pages contiguous. Matrix products contract
/// page-by-page:
///   (A T)_{ijk} = sum_l A_{il} T_{ljk}
///   (T B)_{ijk} = sum_l T_{ilk} B_{lj}
class Tensor3 {
 public:
  Tensor3() : rows_(0), cols_(0), pages_(0) {}
  Tensor3(Eigen::Index rows, Eigen::Index cols, Eigen::Index pages)
      : rows_(rows), cols_(cols), pages_(pages),
        data_(Eigen::VectorXd::Zero(rows * cols * pages)) {}

  static Tensor3 Zero(Eigen::Index r, Eigen::Index c, Eigen::Index p) {
    return Tensor3(r, c, p);
  }

  /// Reshapes (reallocating only on growth) and zero-fills.
  void reset(Eigen::Index r, Eigen::Index c, Eigen::Index p) {
    rows_ = r;
    cols_ = c;
    pages_ = p;
    if (data_.size() != r * c * p) data_.resize(r * c * p);
    data_.setZero();
  }

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  Eigen::Index pages() const { return pages_; }

  double& operator()(Eigen::Index i, Eigen::Index j, Eigen::Index k) {
    return data_[i + rows_ * (j + cols_ * k)];
  }
  double operator()(Eigen::Index i, Eigen::Index j, Eigen::Index k) const {
    return data_[i + rows_ * (j + cols_ * k)];
  }

  Eigen::Map<Eigen::MatrixXd> page(Eigen::Index k) {
    return Eigen::Map<Eigen::MatrixXd>(data_.data() + rows_ * cols_ * k, rows_, cols_);
  }
  Eigen::Map<const Eigen::MatrixXd> page(Eigen::Index k) const {
    return Eigen::Map<const Eigen::MatrixXd>(data_.data() + rows_ * cols_ * k, rows_, cols_);
  }

  Tensor3 transpose12() const;  // out(j,i,k) = in(i,j,k)
  Tensor3 transpose13() const;  // out(k,j,i) = in(i,j,k)
  Tensor3 transpose23() const;  // out(i,k,j) = in(i,j,k)

  Tensor3 block(Eigen::Index i0, Eigen::Index j0, Eigen::Index k0,
                Eigen::Index r, Eigen::Index c, Eigen::Index p) const;
  void set_block(Eigen::Index i0, Eigen::Index j0, Eigen::Index k0, const Tensor3& t);

  Tensor3& operator+=(const Tensor3& rhs);
  Tensor3 operator+(const Tensor3& rhs) const;
  Tensor3 operator-(const Tensor3& rhs) const;
  Tensor3 operator-() const;
  Tensor3 operator*(double s) const;

  double max_abs() const { return data_.size() ? data_.cwiseAbs().maxCoeff() : 0.0; }

  /// Contraction over columns with weights: out(i,k) = sum_j T(i,j,k) w_j.
  Eigen::MatrixXd contract_cols(const Eigen::VectorXd& w) const;

 private:
  Eigen::Index rows_, cols_, pages_;
  Eigen::VectorXd data_;
};

Tensor3 operator*(const Eigen::MatrixXd& A, const Tensor3& T);
Tensor3 operator*(const Tensor3& T, const Eigen::MatrixXd& B);

}  // namespace corikit
