#include "spar/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spar/error.hpp"

namespace spar {

namespace {

constexpr double kGroupCompoundRho = 0.5;
constexpr double kGroupAutoregressiveRho = 0.9;
constexpr double kFactorNoise = 0.1; // so Sigma = F F' + 0.01 I

enum class BlockKind { Compound, Autoregressive, Identity };

struct Block {
    Index begin;
    Index end;
    BlockKind kind;
};

std::vector<Block> group_blocks(const CovarianceSpec& spec)
{
    const Index count = spec.block_count();
    const Index half = count / 2;
    std::vector<Block> blocks;
    for (Index b = 0; b < count; ++b) {
        const Index begin = b * spec.block_size;
        const Index end = b + 1 == count ? spec.p : begin + spec.block_size;
        BlockKind kind = b + 1 == count ? BlockKind::Identity
                         : b < half     ? BlockKind::Compound
                                        : BlockKind::Autoregressive;
        blocks.push_back({begin, end, kind});
    }
    return blocks;
}

// Symmetric square root of (1 - rho) I + rho 1 1' applied to z in place.
void compound_transform(Eigen::Ref<Vector> z, double rho)
{
    const double len = static_cast<double>(z.size());
    const double base = std::sqrt(1.0 - rho);
    const double shift = (std::sqrt(1.0 - rho + len * rho) - base) / len;
    const double total = z.sum();
    z = base * z.array() + shift * total;
}

void autoregressive_transform(Eigen::Ref<Vector> z, double rho)
{
    const double innovation = std::sqrt(1.0 - rho * rho);
    for (Index j = 1; j < z.size(); ++j) z(j) = rho * z(j - 1) + innovation * z(j);
}

double compound_quadratic(const Eigen::Ref<const Vector>& b, double rho)
{
    const double s = b.sum();
    return rho * s * s + (1.0 - rho) * b.squaredNorm();
}

double autoregressive_quadratic(const Eigen::Ref<const Vector>& b, double rho)
{
    const Index len = b.size();
    if (len == 0) return 0.0;
    Vector left(len), right(len);
    left(0) = b(0);
    for (Index j = 1; j < len; ++j) left(j) = b(j) + rho * left(j - 1);
    right(len - 1) = b(len - 1);
    for (Index j = len - 2; j >= 0; --j) right(j) = b(j) + rho * right(j + 1);
    return b.dot(left + right - b);
}

void fill_normal(Eigen::Ref<Vector> v, Rng& rng)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Index j = 0; j < v.size(); ++j) v(j) = normal(rng);
}

} // namespace

Index CovarianceSpec::block_count() const
{
    return std::max<Index>(1, p / block_size);
}

bool CovarianceSpec::partial_last_block() const
{
    return p % block_size != 0;
}

void CovarianceSpec::validate() const
{
    if (p < 1) throw Error(ErrorCode::InvalidArgument, "covariance: p must be >= 1");
    switch (kind) {
    case CovarianceKind::CompoundSymmetry:
        if (!(rho < 1.0) || !(1.0 - rho + static_cast<double>(p) * rho > 0.0))
            throw Error(ErrorCode::NonPositiveDefinite, "compound symmetry rho outside the positive definite range");
        break;
    case CovarianceKind::Autoregressive:
        if (!(std::abs(rho) < 1.0)) throw Error(ErrorCode::NonPositiveDefinite, "autoregressive rho must lie in (-1, 1)");
        break;
    case CovarianceKind::GroupBlock:
        if (block_size < 1) throw Error(ErrorCode::InvalidArgument, "block_size must be >= 1");
        break;
    case CovarianceKind::Factor:
        if (loadings.rows() != p || loadings.cols() < 1)
            throw Error(ErrorCode::InvalidArgument, "factor loadings must be p x k with k >= 1");
        break;
    case CovarianceKind::ExtremeCorrelation:
        if (active < 1 || active > p) throw Error(ErrorCode::InvalidArgument, "extreme correlation needs 1 <= a <= p");
        break;
    case CovarianceKind::Independent:
        break;
    }
}

CovarianceSpec make_covariance(CovarianceKind kind, Index p, Index a, Rng& rng, std::optional<double> rho)
{
    CovarianceSpec spec;
    spec.kind = kind;
    spec.p = p;
    switch (kind) {
    case CovarianceKind::CompoundSymmetry: spec.rho = rho.value_or(kGroupCompoundRho); break;
    case CovarianceKind::Autoregressive: spec.rho = rho.value_or(kGroupAutoregressiveRho); break;
    case CovarianceKind::Factor: {
        spec.loadings.resize(p, std::max<Index>(1, a));
        std::normal_distribution<double> normal(0.0, 1.0);
        for (Index c = 0; c < spec.loadings.cols(); ++c)
            for (Index j = 0; j < p; ++j) spec.loadings(j, c) = normal(rng);
        break;
    }
    case CovarianceKind::ExtremeCorrelation: spec.active = a; break;
    case CovarianceKind::Independent:
    case CovarianceKind::GroupBlock: break;
    }
    spec.validate();
    return spec;
}

Matrix sample_predictors(const CovarianceSpec& spec, Index n, Rng& rng)
{
    spec.validate();
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "sample_predictors: n must be >= 1");
    const Index p = spec.p;
    Matrix X(n, p);
    Vector z(p);
    const auto blocks = spec.kind == CovarianceKind::GroupBlock ? group_blocks(spec) : std::vector<Block>{};
    for (Index i = 0; i < n; ++i) {
        fill_normal(z, rng);
        switch (spec.kind) {
        case CovarianceKind::Independent: break;
        case CovarianceKind::CompoundSymmetry: compound_transform(z, spec.rho); break;
        case CovarianceKind::Autoregressive: autoregressive_transform(z, spec.rho); break;
        case CovarianceKind::GroupBlock:
            for (const auto& b : blocks) {
                auto seg = z.segment(b.begin, b.end - b.begin);
                if (b.kind == BlockKind::Compound) compound_transform(seg, kGroupCompoundRho);
                else if (b.kind == BlockKind::Autoregressive) autoregressive_transform(seg, kGroupAutoregressiveRho);
            }
            break;
        case CovarianceKind::Factor: {
            Vector u(spec.loadings.cols());
            fill_normal(u, rng);
            z = spec.loadings * u + kFactorNoise * z;
            break;
        }
        case CovarianceKind::ExtremeCorrelation: {
            const Index a = spec.active;
            Vector w(a);
            fill_normal(w, rng);
            const double head = z.head(a).sum();
            const double tail_scale = 1.0 / std::sqrt(static_cast<double>(a + 1));
            for (Index j = a; j < p; ++j) z(j) = (z(j) + head) * tail_scale;
            z.head(a) = (z.head(a) + w) / std::sqrt(2.0);
            break;
        }
        }
        X.row(i) = z.transpose();
    }
    return X;
}

double quadratic_form(const CovarianceSpec& spec, const Vector& beta)
{
    spec.validate();
    if (beta.size() != spec.p) throw Error(ErrorCode::DimensionMismatch, "quadratic_form: beta length differs from p");
    switch (spec.kind) {
    case CovarianceKind::Independent: return beta.squaredNorm();
    case CovarianceKind::CompoundSymmetry: return compound_quadratic(beta, spec.rho);
    case CovarianceKind::Autoregressive: return autoregressive_quadratic(beta, spec.rho);
    case CovarianceKind::GroupBlock: {
        double total = 0.0;
        for (const auto& b : group_blocks(spec)) {
            const auto seg = beta.segment(b.begin, b.end - b.begin);
            if (b.kind == BlockKind::Compound) total += compound_quadratic(seg, kGroupCompoundRho);
            else if (b.kind == BlockKind::Autoregressive) total += autoregressive_quadratic(seg, kGroupAutoregressiveRho);
            else total += seg.squaredNorm();
        }
        return total;
    }
    case CovarianceKind::Factor:
        return (spec.loadings.transpose() * beta).squaredNorm() + kFactorNoise * kFactorNoise * beta.squaredNorm();
    case CovarianceKind::ExtremeCorrelation: {
        // Cov: identity on the head, 1/sqrt(2(a+1)) head-tail, a/(a+1) within
        // the tail off the diagonal, unit diagonal.
        const Index a = spec.active;
        const double ad = static_cast<double>(a);
        const auto head = beta.head(a);
        const auto tail = beta.tail(spec.p - a);
        const double tail_sum = tail.sum();
        return head.squaredNorm() + 2.0 * head.sum() * tail_sum / std::sqrt(2.0 * (ad + 1.0)) +
               tail.squaredNorm() / (ad + 1.0) + ad / (ad + 1.0) * tail_sum * tail_sum;
    }
    }
    return 0.0;
}

Index active_count(Regime regime, Index n, Index p)
{
    const double logp = std::log(static_cast<double>(p));
    double a = 0.0;
    switch (regime) {
    case Regime::Sparse: a = 2.0 * logp; break;
    case Regime::Medium: a = static_cast<double>(n) / 2.0 + 2.0 * logp; break;
    case Regime::Dense: a = static_cast<double>(p) / 4.0; break;
    case Regime::ExampleOne: a = static_cast<double>(p) / 20.0; break;
    }
    return std::clamp<Index>(static_cast<Index>(std::lround(a)), 1, p);
}

Vector sample_coefficients(const CoefficientSpec& spec, Index n, Index p, Rng& rng)
{
    if (spec.a < 1 || spec.a > p) throw Error(ErrorCode::InvalidArgument, "sample_coefficients: need 1 <= a <= p");
    Vector beta = Vector::Zero(p);
    switch (spec.scheme) {
    case CoefficientScheme::FanLv: {
        std::vector<Index> positions(static_cast<std::size_t>(p));
        std::iota(positions.begin(), positions.end(), Index{0});
        // partial Fisher-Yates: the first a entries are a uniform a-subset
        for (Index i = 0; i < spec.a; ++i) {
            std::uniform_int_distribution<Index> pick(i, p - 1);
            std::swap(positions[static_cast<std::size_t>(i)], positions[static_cast<std::size_t>(pick(rng))]);
        }
        std::bernoulli_distribution negative(0.4);
        std::normal_distribution<double> normal(0.0, 1.0);
        const double floor = 4.0 * std::log(static_cast<double>(n)) / std::sqrt(static_cast<double>(n));
        for (Index i = 0; i < spec.a; ++i) {
            const double sign = negative(rng) ? -1.0 : 1.0;
            beta(positions[static_cast<std::size_t>(i)]) = sign * (floor + std::abs(normal(rng)));
        }
        break;
    }
    case CoefficientScheme::Ladder:
        for (Index j = 0; j < spec.a; ++j) beta(j) = static_cast<double>(j + 1);
        break;
    case CoefficientScheme::ExampleOne: {
        std::uniform_int_distribution<int> pick(0, 5);
        for (Index j = 0; j < spec.a; ++j) {
            const int k = pick(rng);
            beta(j) = k < 3 ? -static_cast<double>(k + 1) : static_cast<double>(k - 2);
        }
        break;
    }
    }
    return beta;
}

void SimulationDesign::validate() const
{
    if (n < 1 || p < 1 || n_test < 1) throw Error(ErrorCode::InvalidArgument, "design: n, p, n_test must be >= 1");
    if (!(rho_snr > 0.0)) throw Error(ErrorCode::InvalidArgument, "design: rho_snr must be > 0");
    if (active && (*active < 1 || *active > p)) throw Error(ErrorCode::InvalidArgument, "design: active count outside [1, p]");
}

SimulatedData generate(const SimulationDesign& design, std::uint64_t seed)
{
    design.validate();
    Rng rng(seed);
    SimulatedData out;
    const Index a = design.active.value_or(active_count(design.regime, design.n, design.p));
    out.coefficients.a = a;
    out.coefficients.scheme = design.regime == Regime::ExampleOne                      ? CoefficientScheme::ExampleOne
                              : design.setting == CovarianceKind::ExtremeCorrelation ? CoefficientScheme::Ladder
                                                                                     : CoefficientScheme::FanLv;
    out.covariance = make_covariance(design.setting, design.p, a, rng, design.rho);
    Truth truth;
    truth.beta = sample_coefficients(out.coefficients, design.n, design.p, rng);
    truth.mu = design.mu;
    truth.sigma2 = std::isinf(design.rho_snr) ? 0.0 : quadratic_form(out.covariance, truth.beta) / design.rho_snr;
    truth.active_set = support_of(truth.beta);

    const double sigma = std::sqrt(truth.sigma2);
    auto draw = [&](Index rows) {
        Dataset d;
        d.X = sample_predictors(out.covariance, rows, rng);
        std::normal_distribution<double> normal(0.0, 1.0);
        Vector eps(rows);
        for (Index i = 0; i < rows; ++i) eps(i) = sigma * normal(rng);
        d.y = (d.X * truth.beta).array() + design.mu + eps.array();
        d.truth = truth;
        return d;
    };
    out.train = draw(design.n);
    out.test = draw(design.n_test);
    return out;
}

namespace {

constexpr std::pair<CovarianceKind, std::string_view> kKindNames[] = {
    {CovarianceKind::Independent, "independent"},     {CovarianceKind::CompoundSymmetry, "compound"},
    {CovarianceKind::Autoregressive, "autoregressive"}, {CovarianceKind::GroupBlock, "group"},
    {CovarianceKind::Factor, "factor"},               {CovarianceKind::ExtremeCorrelation, "extreme"},
};

constexpr std::pair<Regime, std::string_view> kRegimeNames[] = {
    {Regime::Sparse, "sparse"}, {Regime::Medium, "medium"}, {Regime::Dense, "dense"}, {Regime::ExampleOne, "example1"},
};

} // namespace

std::string_view to_string(CovarianceKind kind)
{
    for (const auto& [k, name] : kKindNames)
        if (k == kind) return name;
    return "unknown";
}

std::string_view to_string(Regime regime)
{
    for (const auto& [r, name] : kRegimeNames)
        if (r == regime) return name;
    return "unknown";
}

std::optional<CovarianceKind> parse_covariance_kind(std::string_view name)
{
    for (const auto& [k, n] : kKindNames)
        if (n == name) return k;
    return std::nullopt;
}

std::optional<Regime> parse_regime(std::string_view name)
{
    for (const auto& [r, n] : kRegimeNames)
        if (n == name) return r;
    return std::nullopt;
}

} // namespace spar
