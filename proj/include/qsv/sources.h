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

#ifndef QSV_SOURCES_H
#define QSV_SOURCES_H

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qsv/linalg.h"
#include "qsv/random.h"
#include "qsv/strategy.h"

namespace qsv {

/// Target-state fidelity of each prepared copy. A copy with fidelity F is the
/// depolarized state v |psi><psi| + (1 - v) 1/4 with v = (4F - 1) / 3.
struct NoiseSpec {
    double fidelity = 1.0;

    double visibility() const {
        return (4.0 * fidelity - 1.0) / 3.0;
    }
};

/// v |psi><psi| + (1 - v) 1/4 with fidelity <psi|rho|psi> = `fidelity`.
/// Throws ValidationError unless fidelity lies in [1/4, 1].
DensityMatrix depolarized(const PureState &psi, double fidelity);
/// Werner state: the singlet depolarized to the given fidelity.
DensityMatrix werner_state(double fidelity);

/// State descriptor used in config files and adversary sweeps:
///   singlet | mixed | werner(F) | singlet_phi(phi) | singlet_phi(phi, F)
struct StateSpec {
    enum class Kind { kSinglet, kMixed, kWerner, kSingletPhi };

    Kind kind = Kind::kSinglet;
    double phi = 0.0;
    double fidelity = 1.0;

    static StateSpec singlet() {
        return {Kind::kSinglet, 0.0, 1.0};
    }
    static StateSpec mixed() {
        return {Kind::kMixed, 0.0, 0.25};
    }
    static StateSpec werner(double f) {
        return {Kind::kWerner, 0.0, f};
    }
    static StateSpec singlet_phi(double phi, double f = 1.0) {
        return {Kind::kSingletPhi, phi, f};
    }

    /// Throws ValidationError with the offending text on a malformed descriptor.
    static StateSpec parse(std::string_view text);
    std::string to_string() const;
    DensityMatrix realize() const;

    bool operator==(const StateSpec &) const = default;
};

struct ProductSequence {
    std::vector<DensityMatrix> states;  // one per system, N + 1 entries
    std::string label;
};

struct MixtureBranch {
    double weight;
    ProductSequence sequence;
};

/// sum_b weight_b * (tensor product over i of sequence_b[i]).
class ProductSequenceMixture {
   public:
    /// Throws ValidationError unless weights are non-negative and sum to 1
    /// (within 1e-12) and every sequence has the same length >= 2.
    explicit ProductSequenceMixture(std::vector<MixtureBranch> branches);

    const std::vector<MixtureBranch> &branches() const noexcept {
        return branches_;
    }
    std::size_t num_systems() const noexcept {
        return num_systems_;
    }
    /// Average over branches and systems of <target|sigma_i|target>: the
    /// fidelity of the unconditional single-system reduced state.
    double mean_fidelity(const PureState &target) const;

   private:
    std::vector<MixtureBranch> branches_;
    std::size_t num_systems_;
};

/// Declarative branch, kept alongside the realized mixture where a readable
/// descriptor is needed (config files, counterexample reports).
struct BranchSpec {
    double weight;
    std::vector<StateSpec> systems;
    std::string label;
};

ProductSequenceMixture build_mixture(const std::vector<BranchSpec> &branches);
/// Compact one-line description, e.g. "0.5:[singlet x3, mixed]; 0.5:[...]".
std::string describe(const std::vector<BranchSpec> &branches);

/// One branch: n_plus_1 copies of the singlet depolarized to noise.fidelity.
ProductSequenceMixture honest_iid(std::int64_t n_plus_1, const NoiseSpec &noise);

/// 2/3 * (noisy singlet)^{n+1} + 1/3 * (1/4)^{n+1}.
ProductSequenceMixture rho1(std::int64_t n, const NoiseSpec &prep);

/// Uniform mixture over the n + 1 positions of one |Psi(phi)> copy among n
/// singlets; every copy depolarized with the same visibility.
ProductSequenceMixture rho2(std::int64_t n, double phi, const NoiseSpec &prep);

/// (1 - eps) |t><t| + eps |perp><perp| with |perp> orthogonal to the target
/// of a homogeneous strategy, so tr(omega * rho) = 1 - nu * eps. This state
/// attains the maximal pass probability at infidelity eps.
DensityMatrix worst_case_state(double eps, const HomogeneousStrategy &strategy);

struct SampledSequence {
    std::size_t branch_index;
    const ProductSequence &sequence;
};

SampledSequence sample_sequence(const ProductSequenceMixture &m, RandomStream &rng);

}  // namespace qsv

#endif
