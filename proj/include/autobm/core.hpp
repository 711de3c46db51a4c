#pragma once

// Domain types shared by every other header: bipolar state vectors,
// symmetric weight sets, training sets and their correlation statistics,
// probability vectors over the 2^N configuration space, and the KL metric.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace autobm {

// Length-N sequence over {-1,+1}. Houses both neuron outputs and training
// vectors.
class BipolarVector {
public:
    explicit BipolarVector(std::vector<std::int8_t> values) : v_(std::move(values)) {
        if (v_.empty())
            throw std::invalid_argument("BipolarVector: length must be >= 1");
        for (auto x : v_)
            if (x != -1 && x != 1)
                throw std::invalid_argument("BipolarVector: entries must be -1 or +1");
    }

    BipolarVector(std::initializer_list<int> values)
        : BipolarVector(narrow(values)) {}

    static BipolarVector filled(int n, std::int8_t value) {
        return BipolarVector(std::vector<std::int8_t>(static_cast<std::size_t>(n), value));
    }

    int size() const { return static_cast<int>(v_.size()); }
    std::int8_t operator[](int i) const { return v_[static_cast<std::size_t>(i)]; }
    std::span<const std::int8_t> values() const { return v_; }

    void set(int i, std::int8_t value) {
        if (value != -1 && value != 1)
            throw std::invalid_argument("BipolarVector::set: value must be -1 or +1");
        v_[static_cast<std::size_t>(i)] = value;
    }

    // "01101" with entry 0 leftmost; '1' marks +1
    std::string bits() const {
        std::string s;
        s.reserve(v_.size());
        for (auto x : v_) s.push_back(x > 0 ? '1' : '0');
        return s;
    }

    bool operator==(const BipolarVector&) const = default;

private:
    static std::vector<std::int8_t> narrow(std::initializer_list<int> values) {
        std::vector<std::int8_t> out;
        out.reserve(values.size());
        for (int x : values) out.push_back(static_cast<std::int8_t>(x));
        return out;
    }

    std::vector<std::int8_t> v_;
};

// Configuration encoding: entry 0 is the most significant bit, -1 -> 0, +1 -> 1.
inline std::uint32_t config_to_index(const BipolarVector& v) {
    std::uint32_t idx = 0;
    for (int i = 0; i < v.size(); ++i)
        idx = (idx << 1) | (v[i] > 0 ? 1u : 0u);
    return idx;
}

inline BipolarVector index_to_config(std::uint32_t index, int n) {
    if (n < 1 || n > 31)
        throw std::invalid_argument("index_to_config: n out of range");
    if (n < 31 && index >= (1u << n))
        throw std::invalid_argument("index_to_config: index out of range");
    std::vector<std::int8_t> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] = ((index >> (n - 1 - i)) & 1u) ? 1 : -1;
    return BipolarVector(std::move(v));
}

// Symmetric zero-diagonal weights plus biases, stored as the strict upper
// triangle so reciprocity holds by construction (one cell per unordered pair).
class WeightSet {
public:
    explicit WeightSet(int n)
        : n_(n),
          upper_(static_cast<std::size_t>(pair_count_of(n)), 0.0),
          bias_(static_cast<std::size_t>(n), 0.0) {
        if (n < 1) throw std::invalid_argument("WeightSet: n must be >= 1");
    }

    static WeightSet zeros(int n) { return WeightSet(n); }

    int size() const { return n_; }
    int pair_count() const { return pair_count_of(n_); }

    static int pair_count_of(int n) { return n * (n - 1) / 2; }

    // flat index of unordered pair {i,j}, i != j, in row-major i<j order
    static int pair_index(int n, int i, int j) {
        if (i > j) std::swap(i, j);
        if (i < 0 || j >= n || i == j)
            throw std::invalid_argument("WeightSet::pair_index: bad pair");
        return i * (2 * n - i - 1) / 2 + (j - i - 1);
    }

    double weight(int i, int j) const {
        if (i == j) return 0.0;
        return upper_[static_cast<std::size_t>(pair_index(n_, i, j))];
    }
    void set_weight(int i, int j, double w) {
        upper_[static_cast<std::size_t>(pair_index(n_, i, j))] = w;
    }

    double bias(int i) const { return bias_[static_cast<std::size_t>(i)]; }
    void set_bias(int i, double b) { bias_[static_cast<std::size_t>(i)] = b; }

    std::span<const double> upper() const { return upper_; }
    std::span<double> upper() { return upper_; }
    std::span<const double> biases() const { return bias_; }
    std::span<double> biases() { return bias_; }

    // all weights and biases multiplied by a common factor
    WeightSet scaled(double factor) const {
        WeightSet out(n_);
        for (std::size_t c = 0; c < upper_.size(); ++c) out.upper_[c] = factor * upper_[c];
        for (std::size_t i = 0; i < bias_.size(); ++i) out.bias_[i] = factor * bias_[i];
        return out;
    }

    bool operator==(const WeightSet&) const = default;

private:
    int n_;
    std::vector<double> upper_;
    std::vector<double> bias_;
};

// E(m) = -sum_{i<j} W_ij m_i m_j - sum_i b_i m_i
inline double energy(const BipolarVector& m, const WeightSet& w) {
    if (m.size() != w.size())
        throw std::invalid_argument("energy: dimension mismatch");
    const int n = m.size();
    double e = 0.0;
    int c = 0;
    auto upper = w.upper();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j, ++c)
            e -= upper[static_cast<std::size_t>(c)] * m[i] * m[j];
    for (int i = 0; i < n; ++i)
        e -= w.bias(i) * m[i];
    return e;
}

// Frequency-weighted first and second moments of a training set.
struct Correlations {
    int n = 0;
    std::vector<double> pair; // n*n row-major, symmetric, unit diagonal
    std::vector<double> site; // length n

    double pair_mean(int i, int j) const {
        return pair[static_cast<std::size_t>(i * n + j)];
    }
    double site_mean(int i) const { return site[static_cast<std::size_t>(i)]; }
};

// Set of bipolar patterns with per-vector frequencies (uniform by default).
class TrainingSet {
public:
    static TrainingSet uniform(std::vector<BipolarVector> vectors) {
        std::vector<double> freq(vectors.size(),
                                 vectors.empty() ? 0.0 : 1.0 / static_cast<double>(vectors.size()));
        return TrainingSet(std::move(vectors), std::move(freq));
    }

    TrainingSet(std::vector<BipolarVector> vectors, std::vector<double> frequencies)
        : vectors_(std::move(vectors)), freq_(std::move(frequencies)) {
        if (vectors_.empty())
            throw std::invalid_argument("TrainingSet: must be non-empty");
        if (freq_.size() != vectors_.size())
            throw std::invalid_argument("TrainingSet: frequency count mismatch");
        const int n = vectors_.front().size();
        for (const auto& v : vectors_)
            if (v.size() != n)
                throw std::invalid_argument("TrainingSet: vectors must all have equal length");
        double sum = 0.0;
        for (double f : freq_) {
            if (f < 0.0) throw std::invalid_argument("TrainingSet: negative frequency");
            sum += f;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw std::invalid_argument("TrainingSet: frequencies must sum to 1");
    }

    int size() const { return static_cast<int>(vectors_.size()); }
    int vector_length() const { return vectors_.front().size(); }
    const BipolarVector& vector(int k) const { return vectors_[static_cast<std::size_t>(k)]; }
    double frequency(int k) const { return freq_[static_cast<std::size_t>(k)]; }

private:
    std::vector<BipolarVector> vectors_;
    std::vector<double> freq_;
};

inline Correlations average_correlations(const TrainingSet& ts) {
    const int n = ts.vector_length();
    Correlations c;
    c.n = n;
    c.pair.assign(static_cast<std::size_t>(n) * n, 0.0);
    c.site.assign(static_cast<std::size_t>(n), 0.0);
    for (int k = 0; k < ts.size(); ++k) {
        const auto& v = ts.vector(k);
        const double f = ts.frequency(k);
        for (int i = 0; i < n; ++i) {
            c.site[static_cast<std::size_t>(i)] += f * v[i];
            for (int j = 0; j < n; ++j)
                c.pair[static_cast<std::size_t>(i * n + j)] += f * v[i] * v[j];
        }
    }
    return c;
}

// Probability vector over all 2^N configurations, indexed by config_to_index.
class Distribution {
public:
    static Distribution from_probs(int n, std::vector<double> probs) {
        Distribution d(n, std::move(probs));
        double sum = 0.0;
        for (double p : d.p_) {
            if (p < 0.0) throw std::invalid_argument("Distribution: negative probability");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("Distribution: probabilities must sum to 1");
        return d;
    }

    static Distribution from_unnormalized(int n, std::vector<double> mass) {
        double sum = std::accumulate(mass.begin(), mass.end(), 0.0);
        if (sum <= 0.0)
            throw std::invalid_argument("Distribution: total mass must be positive");
        for (double& m : mass) {
            if (m < 0.0) throw std::invalid_argument("Distribution: negative mass");
            m /= sum;
        }
        return Distribution(n, std::move(mass));
    }

    static Distribution uniform(int n) {
        const std::size_t bins = std::size_t{1} << n;
        return Distribution(n, std::vector<double>(bins, 1.0 / static_cast<double>(bins)));
    }

    int size() const { return n_; }
    std::size_t bins() const { return p_.size(); }
    double operator[](std::size_t k) const { return p_[k]; }
    std::span<const double> probs() const { return p_; }

    double entropy() const {
        double h = 0.0;
        for (double p : p_)
            if (p > 0.0) h -= p * std::log(p);
        return h;
    }

private:
    Distribution(int n, std::vector<double> probs) : n_(n), p_(std::move(probs)) {
        if (n < 1 || n > 25)
            throw std::invalid_argument("Distribution: n out of range");
        if (p_.size() != (std::size_t{1} << n))
            throw std::invalid_argument("Distribution: wrong bin count");
    }

    int n_;
    std::vector<double> p_;
};

// KL(p_ideal || p_emp') in nats, where p_emp' adds `smoothing` mass per bin
// and renormalizes. With smoothing 0 and empirical support missing an ideal
// state, returns +infinity.
inline double kl_divergence(const Distribution& p_ideal, const Distribution& p_emp,
                            double smoothing) {
    if (p_ideal.size() != p_emp.size())
        throw std::invalid_argument("kl_divergence: dimension mismatch");
    if (smoothing < 0.0)
        throw std::invalid_argument("kl_divergence: smoothing must be >= 0");
    const double denom = 1.0 + smoothing * static_cast<double>(p_emp.bins());
    double kl = 0.0;
    for (std::size_t k = 0; k < p_ideal.bins(); ++k) {
        const double p = p_ideal[k];
        if (p <= 0.0) continue;
        const double q = (p_emp[k] + smoothing) / denom;
        if (q <= 0.0) return std::numeric_limits<double>::infinity();
        kl += p * std::log(p / q);
    }
    return kl;
}

inline double total_variation(const Distribution& a, const Distribution& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("total_variation: dimension mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < a.bins(); ++k)
        s += std::abs(a[k] - b[k]);
    return 0.5 * s;
}

// Uniform multiplier on all weights and biases; acts as inverse temperature.
class AnnealFactor {
public:
    explicit AnnealFactor(double i0) : i0_(i0) {
        if (!(i0 > 0.0))
            throw std::invalid_argument("AnnealFactor: i0 must be > 0");
    }
    double value() const { return i0_; }

private:
    double i0_;
};

} // namespace autobm
