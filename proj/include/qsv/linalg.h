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

#ifndef QSV_LINALG_H
#define QSV_LINALG_H

#include <array>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace qsv {

using Complex = std::complex<double>;

/// Per-entry tolerance used by ComplexMatrix::approx_equal when none is given.
inline constexpr double kEntryTolerance = 1e-12;
/// Tolerance for the Hermitian / trace / PSD checks on density matrices.
inline constexpr double kStateTolerance = 1e-10;

/// Dense square complex matrix of dimension 2 or 4.
///
/// Storage is row-major: entry (r, c) lives at index r * dim + c. For two-qubit
/// operators the computational basis is ordered |00>, |01>, |10>, |11>, i.e.
/// basis index = 2 * (first qubit) + (second qubit). Every other module relies
/// on this ordering.
class ComplexMatrix {
   public:
    /// Zero matrix.
    explicit ComplexMatrix(std::size_t dim);
    ComplexMatrix(std::size_t dim, std::initializer_list<Complex> row_major);

    static ComplexMatrix identity(std::size_t dim);
    static ComplexMatrix diagonal(std::initializer_list<Complex> entries);

    std::size_t dim() const noexcept {
        return dim_;
    }
    Complex &operator()(std::size_t row, std::size_t col) noexcept {
        return entries_[row * dim_ + col];
    }
    const Complex &operator()(std::size_t row, std::size_t col) const noexcept {
        return entries_[row * dim_ + col];
    }

    ComplexMatrix adjoint() const;
    Complex trace() const;
    /// Largest entrywise modulus of (this - other).
    double max_abs_diff(const ComplexMatrix &other) const;
    bool approx_equal(const ComplexMatrix &other, double tol = kEntryTolerance) const;
    bool is_hermitian(double tol = kStateTolerance) const;

    ComplexMatrix &operator+=(const ComplexMatrix &rhs);
    ComplexMatrix &operator-=(const ComplexMatrix &rhs);
    ComplexMatrix &operator*=(Complex scale);

   private:
    void require_same_dim(const ComplexMatrix &other) const;

    std::size_t dim_;
    std::array<Complex, 16> entries_{};
};

ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix &rhs);
ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix &rhs);
ComplexMatrix operator*(const ComplexMatrix &lhs, const ComplexMatrix &rhs);
ComplexMatrix operator*(Complex scale, ComplexMatrix m);

ComplexMatrix pauli_i();
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();

/// Kronecker product of two 2x2 operators (first factor acts on the first qubit).
ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b);

/// Eigenvalues of a Hermitian matrix, ascending. Uses cyclic Jacobi rotations on
/// the real symmetric embedding [[Re, -Im], [Im, Re]], whose spectrum is that of
/// the input with every eigenvalue doubled.
std::vector<double> hermitian_eigenvalues(const ComplexMatrix &m);

/// Unit vector in C^4.
class PureState {
   public:
    /// Throws ValidationError if the Euclidean norm deviates from 1 by more than 1e-10.
    explicit PureState(const std::array<Complex, 4> &amplitudes);
    /// Rescales a non-zero vector to unit norm.
    static PureState normalized(const std::array<Complex, 4> &amplitudes);
    static PureState basis(std::size_t index);

    const std::array<Complex, 4> &amplitudes() const noexcept {
        return amps_;
    }
    const Complex &operator[](std::size_t i) const noexcept {
        return amps_[i];
    }
    double norm() const;

   private:
    std::array<Complex, 4> amps_;
};

/// <a|b>.
Complex inner(const PureState &a, const PureState &b);

/// (|01> - |10>) / sqrt(2).
PureState singlet();
/// (|01> - e^{i phi} |10>) / sqrt(2); singlet_phi(0) is the singlet.
PureState singlet_phi(double phi);

/// Validated two-qubit density operator: Hermitian, unit trace and PSD, each
/// within kStateTolerance.
class DensityMatrix {
   public:
    explicit DensityMatrix(const ComplexMatrix &m);

    const ComplexMatrix &matrix() const noexcept {
        return mat_;
    }
    /// <psi| rho |psi>.
    double overlap(const PureState &psi) const;

    static DensityMatrix maximally_mixed();

   private:
    ComplexMatrix mat_;
};

/// Real part of tr(m * s). Throws ValidationError if the imaginary part is not
/// negligible, which means m was not Hermitian.
double expectation(const ComplexMatrix &m, const DensityMatrix &s);
double expectation(const ComplexMatrix &m, const ComplexMatrix &s);

/// |s><s|.
DensityMatrix projector(const PureState &s);
ComplexMatrix outer(const PureState &a, const PureState &b);

/// weight * a + (1 - weight) * b, weight in [0, 1].
DensityMatrix mix(double weight, const DensityMatrix &a, const DensityMatrix &b);

}  // namespace qsv

#endif
