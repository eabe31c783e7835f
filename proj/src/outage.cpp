#include "relaysim/outage.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <vector>

#include "relaysim/error.hpp"

namespace relaysim {

namespace {

constexpr std::size_t kMaxColumns = 32;
using GramMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxColumns, kMaxColumns>;

// log2 det(I + rho * G_SS) for the principal submatrix selected by `mask`.
double subset_log_det(const CMatrix& gram, std::uint64_t mask, double rho) {
    const int m = std::popcount(mask);
    std::size_t index[kMaxColumns];
    int k = 0;
    for (std::uint64_t bits = mask; bits; bits &= bits - 1) {
        index[k++] = static_cast<std::size_t>(std::countr_zero(bits));
    }
    GramMatrix a(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j <= i; ++j) {
            cplx v = rho * gram(static_cast<Eigen::Index>(index[i]), static_cast<Eigen::Index>(index[j]));
            if (i == j) v += 1.0;
            a(i, j) = v;
        }
    }
    Eigen::LLT<GramMatrix, Eigen::Lower> llt(a);
    if (llt.info() != Eigen::Success) {
        throw ComputationError("mutual_info_subset: Cholesky of I + rho*G failed");
    }
    double log_det = 0.0;
    const auto& l = llt.matrixLLT();
    for (int i = 0; i < m; ++i) {
        log_det += std::log2(l(i, i).real());
    }
    return 2.0 * log_det;
}

bool connected(std::uint64_t mask, const std::vector<std::uint64_t>& adjacency) {
    std::uint64_t reached = mask & (~mask + 1);
    std::uint64_t frontier = reached;
    while (frontier) {
        std::uint64_t next = 0;
        for (std::uint64_t bits = frontier; bits; bits &= bits - 1) {
            next |= adjacency[static_cast<std::size_t>(std::countr_zero(bits))];
        }
        next &= mask & ~reached;
        reached |= next;
        frontier = next;
    }
    return reached == mask;
}

void check_limit(std::size_t columns, std::size_t limit) {
    if (columns > limit || columns > kMaxColumns) {
        throw CapacityError("is_outage: " + std::to_string(columns) +
                            " codewords exceed the subset enumeration limit of " + std::to_string(limit));
    }
}

bool violated(const CMatrix& gram, std::uint64_t mask, double rho, double rate) {
    return static_cast<double>(std::popcount(mask)) * rate > subset_log_det(gram, mask, rho);
}

}  // namespace

double rate_scale(const ProtocolSpec& spec) {
    spec.validate();
    const auto l = static_cast<double>(spec.frame_length);
    const auto m = static_cast<double>(spec.sources);
    switch (spec.protocol) {
        case Protocol::Direct: return 2.0;
        case Protocol::StandardStbc: return 4.0;
        case Protocol::RepetitionConcurrent: return (2.0 * l + 1.0) / l;
        case Protocol::SuperpositionConcurrent: return (2.0 * l + 2.0) / l;
        case Protocol::MSourceSuperposition: return (m * l + 2.0) / l;
    }
    throw ParameterError("unhandled protocol");
}

double rate_from_multiplexing(double r, double rho, const ProtocolSpec& spec) {
    require(std::isfinite(r) && r >= 0.0, "multiplexing gain must be finite and >= 0");
    require(std::isfinite(rho) && rho > 0.0, "SNR must be positive");
    if (r == 0.0) return 0.0;
    require(rho > 1.0, "rate undefined for SNR <= 0 dB at nonzero multiplexing gain");
    return rate_scale(spec) * r * std::log2(rho);
}

double RateTarget::per_codeword_rate(const ProtocolSpec& spec, double rho) const {
    if (kind == Kind::Fixed) {
        require(std::isfinite(value) && value >= 0.0, "fixed rate must be finite and >= 0");
        return value;
    }
    return rate_from_multiplexing(value, rho, spec);
}

double mutual_info_subset(const CMatrix& h_sub, double rho) {
    require(h_sub.cols() >= 1 && h_sub.rows() >= 1, "mutual_info_subset: empty matrix");
    require(rho >= 0.0, "mutual_info_subset: SNR must be >= 0");
    if (!h_sub.allFinite() || !std::isfinite(rho)) {
        throw ComputationError("mutual_info_subset: non-finite input");
    }
    check_limit(static_cast<std::size_t>(h_sub.cols()), kMaxColumns);
    const CMatrix gram = h_sub.adjoint() * h_sub;
    const std::uint64_t all = (h_sub.cols() == 64) ? ~0ULL : ((1ULL << h_sub.cols()) - 1);
    return subset_log_det(gram, all, rho);
}

bool is_outage(const CMatrix& h, double rho, double rate, const OutageOptions& options) {
    require(std::isfinite(rate) && rate >= 0.0, "is_outage: rate must be finite and >= 0");
    require(h.cols() >= 1, "is_outage: matrix has no columns");
    if (!h.allFinite() || !std::isfinite(rho)) {
        throw ComputationError("is_outage: non-finite input");
    }
    if (rate == 0.0) return false;

    const auto k = static_cast<std::size_t>(h.cols());
    check_limit(k, kMaxColumns);
    const std::uint64_t all = (1ULL << k) - 1;
    const std::uint64_t columns = options.columns ? options.columns : all;
    require((columns & ~all) == 0, "is_outage: column mask exceeds the matrix width");
    const CMatrix gram = h.adjoint() * h;

    if (options.search == SubsetSearch::Exhaustive) {
        check_limit(static_cast<std::size_t>(std::popcount(columns)), options.subset_limit);
        for (std::uint64_t mask = columns; mask; mask = (mask - 1) & columns) {
            if (violated(gram, mask, rho, rate)) return true;
        }
        return false;
    }

    std::vector<std::uint64_t> adjacency(k, 0);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            if (i != j && gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) != cplx{}) {
                adjacency[i] |= 1ULL << j;
            }
        }
    }

    // Each connected component is searched on its own.
    std::uint64_t unvisited = columns;
    while (unvisited) {
        std::uint64_t component = unvisited & (~unvisited + 1);
        std::uint64_t frontier = component;
        while (frontier) {
            std::uint64_t next = 0;
            for (std::uint64_t bits = frontier; bits; bits &= bits - 1) {
                next |= adjacency[static_cast<std::size_t>(std::countr_zero(bits))];
            }
            next &= columns & ~component;
            component |= next;
            frontier = next;
        }
        unvisited &= ~component;

        check_limit(static_cast<std::size_t>(std::popcount(component)), options.subset_limit);
        // Enumerate every non-empty submask of the component.
        for (std::uint64_t mask = component; mask; mask = (mask - 1) & component) {
            if (connected(mask, adjacency) && violated(gram, mask, rho, rate)) return true;
        }
    }
    return false;
}

std::uint64_t source_columns(const ProtocolSpec& spec, std::size_t source) {
    spec.validate();
    require(source < spec.sources, "source_columns: source index out of range");
    require(spec.codeword_count() <= kMaxColumns, "source_columns: too many codewords");
    std::uint64_t mask = 0;
    for (std::size_t c = source; c < spec.codeword_count(); c += spec.sources) mask |= 1ULL << c;
    return mask;
}

bool is_outage(const EquivalentChannel& h, double rho, double rate, const OutageOptions& options) {
    return is_outage(h.matrix, rho, rate, options);
}

}  // namespace relaysim
