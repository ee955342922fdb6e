#include "corikit/tensor3.hpp"

#include <stdexcept>

namespace corikit {

Tensor3 Tensor3::transpose12() const {
  Tensor3 out(cols_, rows_, pages_);
  for (Eigen::Index k = 0; k < pages_; ++k) out.page(k) = page(k).transpose();
  return out;
}

Tensor3 Tensor3::transpose13() const {
  Tensor3 out(pages_, cols_, rows_);
  for (Eigen::Index k = 0; k < pages_; ++k)
    for (Eigen::Index j = 0; j < cols_; ++j)
      for (Eigen::Index i = 0; i < rows_; ++i) out(k, j, i) = (*this)(i, j, k);
  return out;
}

Tensor3 Tensor3::transpose23() const {
  Tensor3 out(rows_, pages_, cols_);
  for (Eigen::Index k = 0; k < pages_; ++k)
    for (Eigen::Index j = 0; j < cols_; ++j)
      out.page(j).col(k) = page(k).col(j);
  return out;
}

Tensor3 Tensor3::block(Eigen::Index i0, Eigen::Index j0, Eigen::Index k0,
                       Eigen::Index r, Eigen::Index c, Eigen::Index p) const {
  Tensor3 out(r, c, p);
  for (Eigen::Index k = 0; k < p; ++k) out.page(k) = page(k0 + k).block(i0, j0, r, c);
  return out;
}

void Tensor3::set_block(Eigen::Index i0, Eigen::Index j0, Eigen::Index k0, const Tensor3& t) {
  for (Eigen::Index k = 0; k < t.pages(); ++k)
    page(k0 + k).block(i0, j0, t.rows(), t.cols()) = t.page(k);
}

Tensor3& Tensor3::operator+=(const Tensor3& rhs) {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_ || pages_ != rhs.pages_)
    throw std::invalid_argument("Tensor3 shape mismatch");
  data_ += rhs.data_;
  return *this;
}

Tensor3 Tensor3::operator+(const Tensor3& rhs) const {
  Tensor3 out = *this;
  out += rhs;
  return out;
}

Tensor3 Tensor3::operator-(const Tensor3& rhs) const {
  Tensor3 out = *this;
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_ || pages_ != rhs.pages_)
    throw std::invalid_argument("Tensor3 shape mismatch");
  out.data_ -= rhs.data_;
  return out;
}

Tensor3 Tensor3::operator-() const {
  Tensor3 out = *this;
  out.data_ = -out.data_;
  return out;
}

Tensor3 Tensor3::operator*(double s) const {
  Tensor3 out = *this;
  out.data_ *= s;
  return out;
}

Eigen::MatrixXd Tensor3::contract_cols(const Eigen::VectorXd& w) const {
  if (w.size() != cols_) throw std::invalid_argument("contract_cols: weight size mismatch");
  Eigen::MatrixXd out(rows_, pages_);
  for (Eigen::Index k = 0; k < pages_; ++k) out.col(k) = page(k) * w;
  return out;
}

Tensor3 operator*(const Eigen::MatrixXd& A, const Tensor3& T) {
  if (A.cols() != T.rows()) throw std::invalid_argument("mat*tensor shape mismatch");
  Tensor3 out(A.rows(), T.cols(), T.pages());
  for (Eigen::Index k = 0; k < T.pages(); ++k) out.page(k) = A * T.page(k);
  return out;
}

Tensor3 operator*(const Tensor3& T, const Eigen::MatrixXd& B) {
  if (T.cols() != B.rows()) throw std::invalid_argument("tensor*mat shape mismatch");
  Tensor3 out(T.rows(), B.cols(), T.pages());
  for (Eigen::Index k = 0; k < T.pages(); ++k) out.page(k) = T.page(k) * B;
  return out;
}

}  // namespace corikit
