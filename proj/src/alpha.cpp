#include "zipfmf/alpha.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>

#include "zipfmf/errors.hpp"
#include "zipfmf/powerlaw.hpp"
#include "text_util.hpp"

namespace zipfmf {

RankTargets rank_targets(const FactorModel& stage1_model, int top_k) {
    OccurrenceProfile profile = occurrence_profile(stage1_model, top_k);
    const std::int32_t n = stage1_model.num_items;

    std::vector<std::int32_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::int32_t a, std::int32_t b) {
                         if (profile.counts[a] != profile.counts[b])
                             return profile.counts[a] > profile.counts[b];
                         return a < b;
                     });

    RankTargets targets;
    targets.targets.resize(static_cast<std::size_t>(n));
    for (std::int32_t pos = 0; pos < n; ++pos)
        targets.targets[order[pos]] = static_cast<double>(pos + 1);
    return targets;
}

DesignMatrix build_design(const FactorModel& model) {
    DesignMatrix design;
    design.rows = model.num_items;
    design.cols = model.num_users;
    design.values.resize(static_cast<std::size_t>(design.rows) * design.cols);

    const std::int32_t d = model.dim;
    for (std::int32_t i = 0; i < design.cols; ++i) {
        auto ui = model.user_row(i);
        double* col = design.values.data() + static_cast<std::size_t>(i) * design.rows;
        for (std::int32_t j = 0; j < design.rows; ++j) {
            auto vj = model.item_row(j);
            double dot = 0.0;
            for (std::int32_t k = 0; k < d; ++k) dot += ui[k] * vj[k];
            col[j] = dot;
        }
    }
    return design;
}

namespace {

void check_lasso_args(const DesignMatrix& design,
                      const std::vector<double>& targets, double lambda) {
    if (design.rows < 1 || design.cols < 1)
        throw Error("lasso: empty design matrix");
    if (design.values.size() !=
        static_cast<std::size_t>(design.rows) * design.cols)
        throw Error("lasso: design value count does not match dimensions");
    if (targets.size() != static_cast<std::size_t>(design.rows))
        throw Error("lasso: target length must equal design rows");
    if (lambda < 0.0) throw Error("lasso: lambda must be >= 0");
    for (double v : design.values)
        if (!std::isfinite(v)) throw Error("lasso: non-finite design entry");
    for (double v : targets)
        if (!std::isfinite(v)) throw Error("lasso: non-finite target entry");
}

}  // namespace

LassoResult solve_lasso(const DesignMatrix& design,
                        const std::vector<double>& targets, double lambda,
                        double tol, int max_iter) {
    check_lasso_args(design, targets, lambda);
    if (!(tol > 0.0)) throw Error("lasso: tol must be positive");
    if (max_iter < 1) throw Error("lasso: max_iter must be >= 1");

    const std::int32_t rows = design.rows;
    const std::int32_t cols = design.cols;

    std::vector<double> col_sq(static_cast<std::size_t>(cols));
    for (std::int32_t i = 0; i < cols; ++i) {
        const double* col = design.values.data() + static_cast<std::size_t>(i) * rows;
        double sq = 0.0;
        for (std::int32_t j = 0; j < rows; ++j) sq += col[j] * col[j];
        col_sq[i] = sq;
    }

    LassoResult result;
    result.coefficients.assign(static_cast<std::size_t>(cols), 0.0);
    std::vector<double> residual = targets;  // r - A alpha, alpha = 0
    const double half_lambda = lambda / 2.0;
    double best_kkt = std::numeric_limits<double>::infinity();
    int stalled = 0;

    for (int sweep = 1; sweep <= max_iter; ++sweep) {
        double max_delta = 0.0;
        for (std::int32_t i = 0; i < cols; ++i) {
            if (col_sq[i] == 0.0) continue;  // coefficient stays 0
            const double* col =
                design.values.data() + static_cast<std::size_t>(i) * rows;
            const double old = result.coefficients[i];
            double rho = col_sq[i] * old;
            for (std::int32_t j = 0; j < rows; ++j) rho += col[j] * residual[j];

            double next = 0.0;
            if (rho > half_lambda)
                next = (rho - half_lambda) / col_sq[i];
            else if (rho < -half_lambda)
                next = (rho + half_lambda) / col_sq[i];

            const double delta = next - old;
            if (delta != 0.0) {
                for (std::int32_t j = 0; j < rows; ++j)
                    residual[j] -= col[j] * delta;
                result.coefficients[i] = next;
            }
            max_delta = std::max(max_delta, std::fabs(delta));
        }

        double sq = 0.0;
        for (double v : residual) sq += v * v;
        double l1 = 0.0;
        for (double c : result.coefficients) l1 += std::fabs(c);
        result.objective_history.push_back(sq + lambda * l1);
        result.sweeps = sweep;

        // Declare convergence only once the stationarity residual is also
        // small; keep sweeping while it still improves.
        if (max_delta < tol) {
            const double kkt = lasso_kkt_violation(design, targets,
                                                   result.coefficients, lambda);
            if (kkt <= 10.0 * tol) {
                result.converged = true;
                break;
            }
            if (max_delta == 0.0) break;  // exact fixed point, cannot improve
            if (kkt < best_kkt * (1.0 - 1e-4)) {
                best_kkt = kkt;
                stalled = 0;
            } else if (++stalled >= 50) {
                break;  // stationarity residual stopped improving
            }
        }
    }

    result.max_kkt_violation =
        lasso_kkt_violation(design, targets, result.coefficients, lambda);
    return result;
}

double lasso_objective(const DesignMatrix& design,
                       const std::vector<double>& targets,
                       const std::vector<double>& coefficients, double lambda) {
    check_lasso_args(design, targets, lambda);
    if (coefficients.size() != static_cast<std::size_t>(design.cols))
        throw Error("lasso: coefficient length must equal design cols");

    double sq = 0.0;
    for (std::int32_t j = 0; j < design.rows; ++j) {
        double fit = 0.0;
        for (std::int32_t i = 0; i < design.cols; ++i)
            fit += design.at(j, i) * coefficients[i];
        const double diff = targets[j] - fit;
        sq += diff * diff;
    }
    double l1 = 0.0;
    for (double c : coefficients) l1 += std::fabs(c);
    return sq + lambda * l1;
}

double lasso_kkt_violation(const DesignMatrix& design,
                           const std::vector<double>& targets,
                           const std::vector<double>& coefficients,
                           double lambda) {
    check_lasso_args(design, targets, lambda);
    if (coefficients.size() != static_cast<std::size_t>(design.cols))
        throw Error("lasso: coefficient length must equal design cols");

    const std::int32_t rows = design.rows;
    const std::int32_t cols = design.cols;
    std::vector<double> residual(targets);  // r - A alpha
    for (std::int32_t i = 0; i < cols; ++i) {
        const double c = coefficients[i];
        if (c == 0.0) continue;
        const double* col = design.values.data() + static_cast<std::size_t>(i) * rows;
        for (std::int32_t j = 0; j < rows; ++j) residual[j] -= col[j] * c;
    }

    double worst = 0.0;
    for (std::int32_t i = 0; i < cols; ++i) {
        const double* col = design.values.data() + static_cast<std::size_t>(i) * rows;
        double grad = 0.0;  // 2 A_i^T (A alpha - r)
        for (std::int32_t j = 0; j < rows; ++j) grad += col[j] * residual[j];
        grad *= -2.0;

        double violation;
        if (coefficients[i] != 0.0)
            violation = std::fabs(grad + (coefficients[i] > 0.0 ? lambda : -lambda));
        else
            violation = std::max(0.0, std::fabs(grad) - lambda);
        worst = std::max(worst, violation);
    }
    return worst;
}

AlphaCoefficients estimate_alpha(const RatingsDataset& train,
                                 const TrainConfig& stage1_config, int top_k,
                                 double lambda, double tol, int max_iter) {
    TrainResult stage1 = train_vanilla(train, stage1_config);
    RankTargets targets = rank_targets(stage1.model, top_k);
    DesignMatrix design = build_design(stage1.model);
    LassoResult solved = solve_lasso(design, targets.targets, lambda, tol, max_iter);

    AlphaCoefficients alpha;
    alpha.alpha = std::move(solved.coefficients);
    alpha.lasso_lambda = lambda;
    alpha.source_model_hash = model_hash(stage1.model);
    return alpha;
}

namespace {

void hash_bytes(std::uint64_t& h, const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ull;
    }
}

}  // namespace

std::uint64_t model_hash(const FactorModel& model) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    const std::int32_t header[3] = {model.num_users, model.num_items, model.dim};
    hash_bytes(h, header, sizeof(header));
    const double scale[2] = {model.scale.min, model.scale.max};
    hash_bytes(h, scale, sizeof(scale));
    hash_bytes(h, model.u.data(), model.u.size() * sizeof(double));
    hash_bytes(h, model.v.data(), model.v.size() * sizeof(double));
    return h;
}

void write_alpha_csv(const AlphaCoefficients& alpha, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("write_alpha_csv: cannot open " + path);
    out << "user_index,alpha\n";
    for (std::size_t i = 0; i < alpha.alpha.size(); ++i)
        out << i << ',' << detail::format_double(alpha.alpha[i]) << '\n';
    if (!out) throw Error("write_alpha_csv: write failed for " + path);
}

AlphaCoefficients read_alpha_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("read_alpha_csv: cannot open " + path);

    std::string line;
    if (!std::getline(in, line))
        throw ParseError("read_alpha_csv: empty file " + path);
    if (auto header = detail::split_csv_line(line);
        header.size() != 2 || header[0] != "user_index" || header[1] != "alpha")
        throw ParseError("read_alpha_csv: bad header in " + path);

    AlphaCoefficients alpha;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = detail::split_csv_line(line);
        if (fields.size() != 2)
            throw ParseError("read_alpha_csv: expected 2 fields at " + path +
                             ":" + std::to_string(line_no));
        char* end = nullptr;
        const long idx = std::strtol(fields[0].c_str(), &end, 10);
        if (end == fields[0].c_str() || *end != '\0' ||
            idx != static_cast<long>(alpha.alpha.size()))
            throw ParseError("read_alpha_csv: rows must be 0..m-1 in order at " +
                             path + ":" + std::to_string(line_no));
        const double value = std::strtod(fields[1].c_str(), &end);
        if (end == fields[1].c_str() || *end != '\0')
            throw ParseError("read_alpha_csv: bad value at " + path + ":" +
                             std::to_string(line_no));
        alpha.alpha.push_back(value);
    }
    if (alpha.alpha.empty())
        throw ParseError("read_alpha_csv: no coefficient rows in " + path);
    return alpha;
}

}  // namespace zipfmf
