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

#include "qsv/sources.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qsv/errors.h"
#include "qsv/format.h"

namespace qsv {

namespace {

std::string trim_lower(std::string_view text) {
    std::string out;
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    return out;
}

double parse_number(std::string_view text, std::string_view context) {
    double value = 0.0;
    const auto *end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || text.empty()) {
        throw ValidationError("state descriptor '" + std::string(context) + "': cannot parse number '" +
                              std::string(text) + "'");
    }
    return value;
}

// Accepts plain numbers and multiples of pi: "pi", "pi/4", "3pi/4", "0.5*pi".
double parse_angle(std::string_view text, std::string_view context) {
    const auto pos = text.find("pi");
    if (pos == std::string_view::npos) {
        return parse_number(text, context);
    }
    std::string_view coef = text.substr(0, pos);
    if (!coef.empty() && coef.back() == '*') {
        coef.remove_suffix(1);
    }
    std::string_view rest = text.substr(pos + 2);
    double value = std::numbers::pi * (coef.empty() ? 1.0 : parse_number(coef, context));
    if (!rest.empty()) {
        if (rest.front() != '/') {
            throw ValidationError("state descriptor '" + std::string(context) + "': bad angle '" +
                                  std::string(text) + "'");
        }
        value /= parse_number(rest.substr(1), context);
    }
    return value;
}

std::vector<std::string_view> split_args(std::string_view args) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= args.size(); ++i) {
        if (i == args.size() || args[i] == ',') {
            out.push_back(args.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

void require_fidelity_range(double fidelity) {
    if (!(fidelity >= 0.25 && fidelity <= 1.0)) {
        throw ValidationError("fidelity " + format_double(fidelity) +
                              " outside [0.25, 1]; the depolarized state would not be positive");
    }
}

}  // namespace

DensityMatrix depolarized(const PureState &psi, double fidelity) {
    require_fidelity_range(fidelity);
    const double v = NoiseSpec{fidelity}.visibility();
    return DensityMatrix(Complex(v) * outer(psi, psi) + Complex(0.25 * (1.0 - v)) * ComplexMatrix::identity(4));
}

DensityMatrix werner_state(double fidelity) {
    return depolarized(singlet(), fidelity);
}

StateSpec StateSpec::parse(std::string_view text) {
    const std::string s = trim_lower(text);
    if (s == "singlet") {
        return singlet();
    }
    if (s == "mixed") {
        return mixed();
    }
    const auto open = s.find('(');
    if (open == std::string::npos || s.back() != ')') {
        throw ValidationError("unknown state descriptor '" + std::string(text) +
                              "' (expected singlet, mixed, werner(F) or singlet_phi(phi[, F]))");
    }
    const std::string name = s.substr(0, open);
    const auto args = split_args(std::string_view(s).substr(open + 1, s.size() - open - 2));
    StateSpec spec;
    if (name == "werner" && args.size() == 1) {
        spec = werner(parse_number(args[0], text));
    } else if (name == "singlet_phi" && (args.size() == 1 || args.size() == 2)) {
        spec = singlet_phi(parse_angle(args[0], text), args.size() == 2 ? parse_number(args[1], text) : 1.0);
    } else {
        throw ValidationError("unknown state descriptor '" + std::string(text) + "'");
    }
    require_fidelity_range(spec.fidelity);
    return spec;
}

std::string StateSpec::to_string() const {
    switch (kind) {
        case Kind::kSinglet:
            return "singlet";
        case Kind::kMixed:
            return "mixed";
        case Kind::kWerner:
            return "werner(" + format_double(fidelity) + ")";
        case Kind::kSingletPhi:
            if (fidelity == 1.0) {
                return "singlet_phi(" + format_double(phi) + ")";
            }
            return "singlet_phi(" + format_double(phi) + "," + format_double(fidelity) + ")";
    }
    return "?";
}

DensityMatrix StateSpec::realize() const {
    switch (kind) {
        case Kind::kSinglet:
            return projector(qsv::singlet());
        case Kind::kMixed:
            return DensityMatrix::maximally_mixed();
        case Kind::kWerner:
            return werner_state(fidelity);
        case Kind::kSingletPhi:
            return depolarized(qsv::singlet_phi(phi), fidelity);
    }
    throw ValidationError("invalid state kind");
}

ProductSequenceMixture::ProductSequenceMixture(std::vector<MixtureBranch> branches)
    : branches_(std::move(branches)), num_systems_(0) {
    if (branches_.empty()) {
        throw ValidationError("mixture needs at least one branch");
    }
    num_systems_ = branches_.front().sequence.states.size();
    if (num_systems_ < 2) {
        throw ValidationError("product sequences need at least 2 systems");
    }
    double total = 0.0;
    for (const auto &b : branches_) {
        if (!(b.weight >= 0.0)) {
            throw ValidationError("branch weights must be non-negative");
        }
        if (b.sequence.states.size() != num_systems_) {
            throw ValidationError("all branches must have the same number of systems");
        }
        total += b.weight;
    }
    if (std::abs(total - 1.0) > kEntryTolerance) {
        throw ValidationError("branch weights sum to " + format_double(total) + ", expected 1");
    }
}

double ProductSequenceMixture::mean_fidelity(const PureState &target) const {
    double acc = 0.0;
    for (const auto &b : branches_) {
        double branch = 0.0;
        for (const auto &s : b.sequence.states) {
            branch += s.overlap(target);
        }
        acc += b.weight * branch / static_cast<double>(num_systems_);
    }
    return acc;
}

ProductSequenceMixture build_mixture(const std::vector<BranchSpec> &branches) {
    std::vector<MixtureBranch> out;
    out.reserve(branches.size());
    // Realizing a spec runs the full state validation; reuse repeated ones.
    std::vector<std::pair<StateSpec, DensityMatrix>> realized;
    auto lookup = [&realized](const StateSpec &spec) -> const DensityMatrix & {
        for (const auto &[known, rho] : realized) {
            if (known == spec) {
                return rho;
            }
        }
        realized.emplace_back(spec, spec.realize());
        return realized.back().second;
    };
    for (const auto &b : branches) {
        ProductSequence seq;
        seq.label = b.label;
        seq.states.reserve(b.systems.size());
        for (const auto &s : b.systems) {
            seq.states.push_back(lookup(s));
        }
        out.push_back(MixtureBranch{b.weight, std::move(seq)});
    }
    return ProductSequenceMixture(std::move(out));
}

std::string describe(const std::vector<BranchSpec> &branches) {
    std::ostringstream os;
    for (std::size_t b = 0; b < branches.size(); ++b) {
        if (b > 0) {
            os << "; ";
        }
        os << format_double(branches[b].weight) << ":[";
        const auto &sys = branches[b].systems;
        // Run-length encode repeated descriptors.
        for (std::size_t i = 0; i < sys.size();) {
            std::size_t j = i;
            const std::string name = sys[i].to_string();
            while (j < sys.size() && sys[j].to_string() == name) {
                ++j;
            }
            if (i > 0) {
                os << ", ";
            }
            os << name;
            if (j - i > 1) {
                os << " x" << (j - i);
            }
            i = j;
        }
        os << "]";
    }
    return os.str();
}

ProductSequenceMixture honest_iid(std::int64_t n_plus_1, const NoiseSpec &noise) {
    if (n_plus_1 < 2) {
        throw ValidationError("honest_iid needs at least 2 systems");
    }
    const DensityMatrix copy = werner_state(noise.fidelity);
    ProductSequence seq{std::vector<DensityMatrix>(static_cast<std::size_t>(n_plus_1), copy), "honest"};
    return ProductSequenceMixture({MixtureBranch{1.0, std::move(seq)}});
}

ProductSequenceMixture rho1(std::int64_t n, const NoiseSpec &prep) {
    if (n < 1) {
        throw ValidationError("rho1 needs n >= 1");
    }
    const auto count = static_cast<std::size_t>(n + 1);
    ProductSequence good{std::vector<DensityMatrix>(count, werner_state(prep.fidelity)), "singlet"};
    ProductSequence bad{std::vector<DensityMatrix>(count, DensityMatrix::maximally_mixed()), "mixed"};
    return ProductSequenceMixture({MixtureBranch{2.0 / 3.0, std::move(good)}, MixtureBranch{1.0 / 3.0, std::move(bad)}});
}

ProductSequenceMixture rho2(std::int64_t n, double phi, const NoiseSpec &prep) {
    if (n < 1) {
        throw ValidationError("rho2 needs n >= 1");
    }
    const auto count = static_cast<std::size_t>(n + 1);
    const DensityMatrix good = werner_state(prep.fidelity);
    const DensityMatrix odd = depolarized(singlet_phi(phi), prep.fidelity);
    std::vector<MixtureBranch> branches;
    branches.reserve(count);
    for (std::size_t l = 0; l < count; ++l) {
        ProductSequence seq{std::vector<DensityMatrix>(count, good), "odd@" + std::to_string(l)};
        seq.states[l] = odd;
        branches.push_back(MixtureBranch{1.0 / static_cast<double>(count), std::move(seq)});
    }
    return ProductSequenceMixture(std::move(branches));
}

DensityMatrix worst_case_state(double eps, const HomogeneousStrategy &strategy) {
    if (!(eps >= 0.0 && eps <= 1.0)) {
        throw ValidationError("worst_case_state: eps must lie in [0, 1]");
    }
    const PureState &t = strategy.target();
    // Gram-Schmidt the basis vector with the largest component orthogonal to t.
    std::array<Complex, 4> best{};
    double best_norm = -1.0;
    for (std::size_t i = 0; i < 4; ++i) {
        std::array<Complex, 4> v{};
        v[i] = 1.0;
        const Complex c = std::conj(t[i]);
        for (std::size_t j = 0; j < 4; ++j) {
            v[j] -= c * t[j];
        }
        double sq = 0.0;
        for (const auto &a : v) {
            sq += std::norm(a);
        }
        if (sq > best_norm) {
            best_norm = sq;
            best = v;
        }
    }
    const PureState perp = PureState::normalized(best);
    return DensityMatrix(Complex(1.0 - eps) * outer(t, t) + Complex(eps) * outer(perp, perp));
}

SampledSequence sample_sequence(const ProductSequenceMixture &m, RandomStream &rng) {
    const auto &branches = m.branches();
    std::size_t index = 0;
    if (branches.size() > 1) {
        std::vector<double> weights(branches.size());
        std::transform(branches.begin(), branches.end(), weights.begin(), [](const MixtureBranch &b) { return b.weight; });
        index = rng.choose(weights);
    }
    return SampledSequence{index, branches[index].sequence};
}

}  // namespace qsv
