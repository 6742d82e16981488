#include "pbill/iet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace pbill {

namespace {

constexpr double kMergeTol = 1e-13;

}  // namespace

IET::IET(std::vector<double> breakpoints, std::vector<double> translations, double tiling_tol)
    : breakpoints_(std::move(breakpoints)), translations_(std::move(translations)) {
    if (translations_.empty() || breakpoints_.size() != translations_.size() + 1)
        throw std::invalid_argument("IET: need n+1 breakpoints for n translations");
    if (breakpoints_.front() != 0.0 || breakpoints_.back() != 1.0)
        throw std::invalid_argument("IET: breakpoints must start at 0 and end at 1");
    for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i)
        if (!(breakpoints_[i] < breakpoints_[i + 1]))
            throw std::invalid_argument("IET: breakpoints must be strictly increasing");
    const double defect = tiling_defect();
    if (defect > tiling_tol) {
        std::ostringstream os;
        os << "IET: image intervals do not tile [0,1) (defect " << defect << ")";
        throw std::invalid_argument(os.str());
    }
}

IET IET::identity() { return IET({0.0, 1.0}, {0.0}); }

IET IET::rotation(double alpha) {
    alpha -= std::floor(alpha);
    if (alpha == 0.0) return identity();
    return IET({0.0, 1.0 - alpha, 1.0}, {alpha, alpha - 1.0});
}

IET IET::from_permutation(const std::vector<double>& lengths, const std::vector<int>& perm) {
    const std::size_t n = lengths.size();
    if (perm.size() != n) throw std::invalid_argument("IET: permutation size mismatch");
    const double total = std::accumulate(lengths.begin(), lengths.end(), 0.0);
    std::vector<double> bp(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) bp[i + 1] = bp[i] + lengths[i] / total;
    bp[n] = 1.0;
    // order[p] = interval placed at image position p
    std::vector<int> order(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        const int pos = perm[i] - 1;
        if (pos < 0 || pos >= static_cast<int>(n) || order[pos] != -1)
            throw std::invalid_argument("IET: invalid permutation");
        order[pos] = static_cast<int>(i);
    }
    std::vector<double> tr(n);
    double cursor = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        const int i = order[p];
        tr[i] = cursor - bp[i];
        cursor += lengths[i] / total;
    }
    return IET(std::move(bp), std::move(tr));
}

int IET::interval_of(double x) const {
    const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
    int i = static_cast<int>(it - breakpoints_.begin()) - 1;
    return std::clamp(i, 0, intervals() - 1);
}

double IET::evaluate(double x) const {
    if (!(x >= 0.0 && x < 1.0)) throw std::out_of_range("IET::evaluate: point outside [0,1)");
    const double y = x + translations_[interval_of(x)];
    if (y < 0.0) return 0.0;
    if (y >= 1.0) return std::nextafter(1.0, 0.0);
    return y;
}

std::vector<int> IET::permutation() const {
    const int n = intervals();
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return breakpoints_[a] + translations_[a] < breakpoints_[b] + translations_[b]; });
    std::vector<int> perm(n);
    for (int p = 0; p < n; ++p) perm[idx[p]] = p + 1;
    return perm;
}

double IET::tiling_defect() const {
    const int n = intervals();
    std::vector<std::pair<double, double>> images;
    images.reserve(n);
    for (int i = 0; i < n; ++i)
        images.emplace_back(breakpoints_[i] + translations_[i], breakpoints_[i + 1] + translations_[i]);
    std::sort(images.begin(), images.end());
    double defect = std::abs(images.front().first);
    for (int i = 0; i + 1 < n; ++i) defect = std::max(defect, std::abs(images[i].second - images[i + 1].first));
    defect = std::max(defect, std::abs(images.back().second - 1.0));
    return defect;
}

IET IET::inverse() const {
    const int n = intervals();
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return breakpoints_[a] + translations_[a] < breakpoints_[b] + translations_[b]; });
    std::vector<double> bp{0.0};
    std::vector<double> tr;
    for (int p = 0; p < n; ++p) {
        const int i = idx[p];
        if (p > 0) bp.push_back(breakpoints_[i] + translations_[i]);
        tr.push_back(-translations_[i]);
    }
    bp.push_back(1.0);
    return IET(std::move(bp), std::move(tr));
}

IET IET::after(const IET& first, std::size_t max_intervals) const {
    // Breakpoints of (this o first): those of `first` plus first-preimages of ours.
    std::vector<double> cuts(first.breakpoints_.begin(), first.breakpoints_.end() - 1);
    for (int j = 1; j < intervals(); ++j) {
        const double b = breakpoints_[j];
        for (int i = 0; i < first.intervals(); ++i) {
            const double lo = first.breakpoints_[i] + first.translations_[i];
            const double hi = first.breakpoints_[i + 1] + first.translations_[i];
            if (b > lo + kMergeTol && b < hi - kMergeTol) {
                cuts.push_back(b - first.translations_[i]);
                break;
            }
        }
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> uniq;
    for (double c : cuts)
        if (uniq.empty() || c - uniq.back() > kMergeTol) uniq.push_back(c);
    uniq.push_back(1.0);

    std::vector<double> bp{0.0};
    std::vector<double> tr;
    for (std::size_t q = 0; q + 1 < uniq.size(); ++q) {
        const double mid = 0.5 * (uniq[q] + uniq[q + 1]);
        const int i = first.interval_of(mid);
        const double y = mid + first.translations_[i];
        const int j = interval_of(std::clamp(y, 0.0, std::nextafter(1.0, 0.0)));
        const double shift = first.translations_[i] + translations_[j];
        if (!tr.empty() && std::abs(shift - tr.back()) <= kMergeTol) continue;
        if (!tr.empty()) bp.push_back(uniq[q]);
        tr.push_back(shift);
        if (tr.size() > max_intervals) {
            std::ostringstream os;
            os << "composition exceeds the interval budget of " << max_intervals;
            throw IntervalBudgetExceeded(os.str());
        }
    }
    bp.push_back(1.0);
    return IET(std::move(bp), std::move(tr), 1e-10);
}

IET power(const IET& t, int k, std::size_t max_intervals) {
    if (k == 0) throw std::invalid_argument("power: k must be nonzero");
    const IET base = k > 0 ? t : t.inverse();
    IET acc = base;
    for (int i = 1; i < std::abs(k); ++i) acc = base.after(acc, max_intervals);
    return acc;
}

std::vector<double> singular_points(const IET& t) {
    // Breakpoints where T is discontinuous with [0,1) closed up into a circle.
    const auto& bp = t.breakpoints();
    const auto& tr = t.translations();
    const int n = t.intervals();
    std::vector<double> out;
    for (int i = 0; i < n; ++i) {
        const double right = bp[i] + tr[i];
        const double left = i == 0 ? 1.0 + tr[n - 1] : bp[i] + tr[i - 1];
        double gap = std::abs(right - left);
        gap = std::min(gap, std::abs(gap - 1.0));
        if (gap > 1e-12) out.push_back(bp[i]);
    }
    if (out.empty()) out.push_back(0.0);
    return out;
}

SaddleSearch has_saddle_connection(const IET& t, int horizon, double eps) {
    const std::vector<double> pts = singular_points(t);
    return has_saddle_connection(t, horizon, pts, eps);
}

double left_limit_image(const IET& t, double x) {
    const auto& bp = t.breakpoints();
    const auto& tr = t.translations();
    if (x <= 0.0) x = 1.0;
    // interval whose closure holds x from the left
    const auto it = std::lower_bound(bp.begin() + 1, bp.end(), x);
    const int k = std::min(static_cast<int>(it - bp.begin()) - 1, t.intervals() - 1);
    const double y = x + tr[k];
    return y - std::floor(y);
}

SaddleSearch has_saddle_connection(const IET& t, int horizon, std::span<const double> singular, double eps) {
    const auto& bp = t.breakpoints();
    std::vector<SeparatrixSeed> seeds;
    for (double x : singular) {
        seeds.push_back({x, false});
        const int k = t.interval_of(x);
        // Away from 0 and the breakpoints T is continuous and the left orbit
        // is the right one.
        if (x <= 0.0 || std::abs(bp[k] - x) <= 1e-15) seeds.push_back({x, true});
    }
    SaddleSearch r = has_saddle_connection(t, horizon, seeds, singular, eps);
    if (r.found) {
        // report the seed as an index into `singular`
        const double x = seeds[r.seed].x;
        r.seed = static_cast<int>(std::find(singular.begin(), singular.end(), x) - singular.begin());
    }
    return r;
}

SaddleSearch has_saddle_connection(const IET& t, int horizon, std::span<const SeparatrixSeed> seeds,
                                   std::span<const double> singular_targets, double eps) {
    SaddleSearch r;
    r.horizon = horizon;
    std::vector<double> targets(singular_targets.begin(), singular_targets.end());
    std::sort(targets.begin(), targets.end());

    auto nearest_target = [&](double x, double& dist) {
        const auto it = std::lower_bound(targets.begin(), targets.end(), x);
        int best = -1;
        dist = 2.0;
        if (it != targets.end()) {
            dist = *it - x;
            best = static_cast<int>(it - targets.begin());
        }
        if (it != targets.begin() && x - *(it - 1) < dist) {
            dist = x - *(it - 1);
            best = static_cast<int>(it - targets.begin()) - 1;
        }
        // 0 and 1 are the same point of the circle.
        if (!targets.empty() && targets.front() == 0.0 && 1.0 - x < dist) {
            dist = 1.0 - x;
            best = 0;
        }
        return best;
    };

    for (int i = 0; i < static_cast<int>(seeds.size()); ++i) {
        const SeparatrixSeed& seed = seeds[i];
        double x = seed.from_left ? left_limit_image(t, seed.x) : t.evaluate(seed.x);
        std::vector<double> trace{seed.x, x};
        for (int s = 1; s <= horizon; ++s) {
            double dist = 0.0;
            const int target = nearest_target(x, dist);
            if (target >= 0 && dist <= eps) {
                r.found = true;
                r.low_confidence = dist > 1e-12;
                r.seed = i;
                r.from_left_limit = seed.from_left;
                // index into the caller's target list
                r.target = static_cast<int>(std::find(singular_targets.begin(), singular_targets.end(), targets[target]) -
                                            singular_targets.begin());
                r.steps = s;
                r.distance = dist;
                r.trace = std::move(trace);
                return r;
            }
            if (s == horizon) break;
            x = t.evaluate(x);
            if (trace.size() < 64) trace.push_back(x);
        }
    }
    return r;
}

MinimalityWitness minimality_witness(const IET& t, double x0, int iterations, double delta) {
    std::vector<double> orbit;
    orbit.reserve(iterations);
    double x = x0;
    for (int i = 0; i < iterations; ++i) {
        orbit.push_back(x);
        x = t.evaluate(x);
    }
    std::sort(orbit.begin(), orbit.end());
    MinimalityWitness w;
    w.delta = delta;
    // Gaps at the two ends count once, interior gaps twice.
    double worst = orbit.front() / delta;
    w.gap_lo = 0.0;
    w.gap_hi = orbit.front();
    double widest = orbit.front();
    for (std::size_t i = 0; i + 1 < orbit.size(); ++i) {
        const double g = orbit[i + 1] - orbit[i];
        worst = std::max(worst, g / (2 * delta));
        if (g > widest) {
            widest = g;
            w.gap_lo = orbit[i];
            w.gap_hi = orbit[i + 1];
        }
    }
    const double tail = 1.0 - orbit.back();
    worst = std::max(worst, tail / delta);
    if (tail > widest) {
        w.gap_lo = orbit.back();
        w.gap_hi = 1.0;
    }
    w.dense = worst <= 1.0;
    return w;
}

}  // namespace pbill
