// Copyright 2026 The qsv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qsv/linalg.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "qsv/errors.h"

namespace qsv {

namespace {

void require_supported_dim(std::size_t dim) {
    if (dim != 2 && dim != 4) {
        throw ValidationError("matrix dimension must be 2 or 4, got " + std::to_string(dim));
    }
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t dim) : dim_(dim) {
    require_supported_dim(dim);
}

ComplexMatrix::ComplexMatrix(std::size_t dim, std::initializer_list<Complex> row_major) : dim_(dim) {
    require_supported_dim(dim);
    if (row_major.size() != dim * dim) {
        throw ValidationError("expected " + std::to_string(dim * dim) + " entries, got " +
                              std::to_string(row_major.size()));
    }
    std::copy(row_major.begin(), row_major.end(), entries_.begin());
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::initializer_list<Complex> entries) {
    ComplexMatrix m(entries.size());
    std::size_t i = 0;
    for (const auto &e : entries) {
        m(i, i) = e;
        ++i;
    }
    return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(dim_);
    for (std::size_t r = 0; r < dim_; ++r) {
        for (std::size_t c = 0; c < dim_; ++c) {
            out(c, r) = std::conj((*this)(r, c));
        }
    }
    return out;
}

Complex ComplexMatrix::trace() const {
    Complex t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
        t += (*this)(i, i);
    }
    return t;
}

double ComplexMatrix::max_abs_diff(const ComplexMatrix &other) const {
    require_same_dim(other);
    double worst = 0.0;
    for (std::size_t i = 0; i < dim_ * dim_; ++i) {
        worst = std::max(worst, std::abs(entries_[i] - other.entries_[i]));
    }
    return worst;
}

bool ComplexMatrix::approx_equal(const ComplexMatrix &other, double tol) const {
    return dim_ == other.dim_ && max_abs_diff(other) <= tol;
}

bool ComplexMatrix::is_hermitian(double tol) const {
    return max_abs_diff(adjoint()) <= tol;
}

ComplexMatrix &ComplexMatrix::operator+=(const ComplexMatrix &rhs) {
    require_same_dim(rhs);
    for (std::size_t i = 0; i < dim_ * dim_; ++i) {
        entries_[i] += rhs.entries_[i];
    }
    return *this;
}

ComplexMatrix &ComplexMatrix::operator-=(const ComplexMatrix &rhs) {
    require_same_dim(rhs);
    for (std::size_t i = 0; i < dim_ * dim_; ++i) {
        entries_[i] -= rhs.entries_[i];
    }
    return *this;
}

ComplexMatrix &ComplexMatrix::operator*=(Complex scale) {
    for (auto &e : entries_) {
        e *= scale;
    }
    return *this;
}

void ComplexMatrix::require_same_dim(const ComplexMatrix &other) const {
    if (dim_ != other.dim_) {
        throw ValidationError("dimension mismatch: " + std::to_string(dim_) + " vs " + std::to_string(other.dim_));
    }
}

ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix &rhs) {
    lhs += rhs;
    return lhs;
}

ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix &rhs) {
    lhs -= rhs;
    return lhs;
}

ComplexMatrix operator*(const ComplexMatrix &lhs, const ComplexMatrix &rhs) {
    if (lhs.dim() != rhs.dim()) {
        throw ValidationError("dimension mismatch in matrix product");
    }
    const std::size_t d = lhs.dim();
    ComplexMatrix out(d);
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            Complex acc = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                acc += lhs(r, j) * rhs(j, c);
            }
            out(r, c) = acc;
        }
    }
    return out;
}

ComplexMatrix operator*(Complex scale, ComplexMatrix m) {
    m *= scale;
    return m;
}

ComplexMatrix pauli_i() {
    return ComplexMatrix::identity(2);
}

ComplexMatrix pauli_x() {
    return ComplexMatrix(2, {0.0, 1.0, 1.0, 0.0});
}

ComplexMatrix pauli_y() {
    return ComplexMatrix(2, {0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0});
}

ComplexMatrix pauli_z() {
    return ComplexMatrix(2, {1.0, 0.0, 0.0, -1.0});
}

ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b) {
    if (a.dim() != 2 || b.dim() != 2) {
        throw ValidationError("kron expects two 2x2 operators");
    }
    ComplexMatrix out(4);
    for (std::size_t r1 = 0; r1 < 2; ++r1) {
        for (std::size_t c1 = 0; c1 < 2; ++c1) {
            for (std::size_t r2 = 0; r2 < 2; ++r2) {
                for (std::size_t c2 = 0; c2 < 2; ++c2) {
                    out(2 * r1 + r2, 2 * c1 + c2) = a(r1, c1) * b(r2, c2);
                }
            }
        }
    }
    return out;
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix &m) {
    if (!m.is_hermitian()) {
        throw ValidationError("hermitian_eigenvalues: matrix is not Hermitian");
    }
    const std::size_t d = m.dim();
    const std::size_t n = 2 * d;
    std::array<std::array<double, 8>, 8> a{};
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            const double re = m(r, c).real();
            const double im = m(r, c).imag();
            a[r][c] = re;
            a[r + d][c + d] = re;
            a[r][c + d] = -im;
            a[r + d][c] = im;
        }
    }

    // Cyclic Jacobi sweeps; an 8x8 symmetric matrix settles in well under 50.
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                off += a[p][q] * a[p][q];
            }
        }
        if (off < 1e-30) {
            break;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300) {
                    continue;
                }
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p];
                    const double akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k];
                    const double aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }

    std::vector<double> doubled(n);
    for (std::size_t i = 0; i < n; ++i) {
        doubled[i] = a[i][i];
    }
    std::sort(doubled.begin(), doubled.end());
    std::vector<double> eig(d);
    for (std::size_t i = 0; i < d; ++i) {
        eig[i] = 0.5 * (doubled[2 * i] + doubled[2 * i + 1]);
    }
    return eig;
}

PureState::PureState(const std::array<Complex, 4> &amplitudes) : amps_(amplitudes) {
    if (std::abs(norm() - 1.0) > kStateTolerance) {
        throw ValidationError("pure state is not normalized (norm " + std::to_string(norm()) + ")");
    }
}

PureState PureState::normalized(const std::array<Complex, 4> &amplitudes) {
    double sq = 0.0;
    for (const auto &a : amplitudes) {
        sq += std::norm(a);
    }
    if (sq == 0.0) {
        throw ValidationError("cannot normalize the zero vector");
    }
    const double scale = 1.0 / std::sqrt(sq);
    std::array<Complex, 4> out{};
    for (std::size_t i = 0; i < 4; ++i) {
        out[i] = amplitudes[i] * scale;
    }
    return PureState(out);
}

PureState PureState::basis(std::size_t index) {
    if (index >= 4) {
        throw ValidationError("basis index out of range");
    }
    std::array<Complex, 4> amps{};
    amps[index] = 1.0;
    return PureState(amps);
}

double PureState::norm() const {
    double sq = 0.0;
    for (const auto &a : amps_) {
        sq += std::norm(a);
    }
    return std::sqrt(sq);
}

Complex inner(const PureState &a, const PureState &b) {
    Complex acc = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        acc += std::conj(a[i]) * b[i];
    }
    return acc;
}

PureState singlet() {
    return singlet_phi(0.0);
}

PureState singlet_phi(double phi) {
    const double h = 1.0 / std::sqrt(2.0);
    return PureState({0.0, h, -std::polar(h, phi), 0.0});
}

DensityMatrix::DensityMatrix(const ComplexMatrix &m) : mat_(m) {
    if (m.dim() != 4) {
        throw ValidationError("density matrix must be 4x4");
    }
    if (!m.is_hermitian(kStateTolerance)) {
        throw ValidationError("density matrix is not Hermitian");
    }
    const Complex tr = m.trace();
    if (std::abs(tr - 1.0) > kStateTolerance) {
        throw ValidationError("density matrix trace is " + std::to_string(tr.real()) + ", expected 1");
    }
    const auto eig = hermitian_eigenvalues(m);
    if (eig.front() < -kStateTolerance) {
        throw ValidationError("density matrix has negative eigenvalue " + std::to_string(eig.front()));
    }
}

double DensityMatrix::overlap(const PureState &psi) const {
    Complex acc = 0.0;
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 4; ++c) {
            acc += std::conj(psi[r]) * mat_(r, c) * psi[c];
        }
    }
    return acc.real();
}

DensityMatrix DensityMatrix::maximally_mixed() {
    return DensityMatrix(0.25 * ComplexMatrix::identity(4));
}

double expectation(const ComplexMatrix &m, const ComplexMatrix &s) {
    if (m.dim() != s.dim()) {
        throw ValidationError("expectation: dimension mismatch");
    }
    // Spelled out in real arithmetic: std::complex multiplication carries
    // NaN/inf recovery that dominates the simulator's inner loop.
    double re = 0.0;
    double im = 0.0;
    const std::size_t d = m.dim();
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            const Complex a = m(r, c);
            const Complex b = s(c, r);
            re += a.real() * b.real() - a.imag() * b.imag();
            im += a.real() * b.imag() + a.imag() * b.real();
        }
    }
    const Complex acc(re, im);
    if (std::abs(acc.imag()) >= kStateTolerance) {
        throw ValidationError("expectation: trace has imaginary part " + std::to_string(acc.imag()) +
                              "; operand is not Hermitian");
    }
    return acc.real();
}

double expectation(const ComplexMatrix &m, const DensityMatrix &s) {
    return expectation(m, s.matrix());
}

ComplexMatrix outer(const PureState &a, const PureState &b) {
    ComplexMatrix out(4);
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 4; ++c) {
            out(r, c) = a[r] * std::conj(b[c]);
        }
    }
    return out;
}

DensityMatrix projector(const PureState &s) {
    return DensityMatrix(outer(s, s));
}

DensityMatrix mix(double weight, const DensityMatrix &a, const DensityMatrix &b) {
    if (!(weight >= 0.0 && weight <= 1.0)) {
        throw ValidationError("mixing weight must lie in [0, 1]");
    }
    return DensityMatrix(weight * a.matrix() + (1.0 - weight) * b.matrix());
}

}  // namespace qsv
