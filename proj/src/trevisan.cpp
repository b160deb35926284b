#include "qrx/trevisan.hpp"

#include <bit>
#include <cmath>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <thread>
#include <unordered_map>

#include "qrx/errors.hpp"

namespace qrx {

namespace {

bool is_pow2(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

unsigned log2_exact(std::uint64_t v) { return static_cast<unsigned>(std::countr_zero(v)); }

unsigned ceil_log2(std::uint64_t v) {
    return static_cast<unsigned>(std::bit_width(v - 1));
}

}  // namespace

double trevisan_rho(double k, std::uint64_t n_f, double epsilon_log2, std::uint64_t d) {
    if (n_f == 0) throw ContractError("trevisan_rho: n_f must be positive");
    const double log_nf_over_eps = std::log2(static_cast<double>(n_f)) - epsilon_log2;
    return (k - 3.0 * log_nf_over_eps - static_cast<double>(d) - 3.0) /
           static_cast<double>(n_f);
}

TrevisanParams solve_trevisan_params(std::uint64_t n_i, std::uint64_t n_f,
                                     std::optional<double> epsilon_log2,
                                     std::optional<double> k) {
    if (!is_pow2(n_i) || !is_pow2(n_f))
        throw ContractError("solve_trevisan_params: n_i and n_f must be powers of two");
    if (n_f >= n_i)
        throw ContractError("solve_trevisan_params: n_f must be smaller than n_i");
    const double k_val = k.value_or(static_cast<double>(n_i));
    if (static_cast<double>(n_f) > k_val)
        throw SizingError("solve_trevisan_params: requested n_f exceeds source min-entropy k");

    const unsigned log_ni = log2_exact(n_i);
    const unsigned log_nf = log2_exact(n_f);

    unsigned m_e = 0;
    double eps = 0.0;
    if (epsilon_log2.has_value()) {
        eps = *epsilon_log2;
        if (eps > 0.0)
            throw ContractError("solve_trevisan_params: log2(eps) must be <= 0");
        const double need = static_cast<double>(log_ni) + 2.0 * static_cast<double>(log_nf) -
                            2.0 * eps + 4.0;
        if (need > 256.0)
            throw SizingError("solve_trevisan_params: no field degree m_e <= 256 satisfies the "
                              "codeword bound for this epsilon");
        m_e = static_cast<unsigned>(std::ceil(need));
    } else {
        // Default: smallest power-of-two field degree whose induced security
        // parameter eps = sqrt(2^(4-m_e) * n_i * n_f^2) is at most 2^-40.
        auto induced = [&](unsigned me) {
            return (4.0 - static_cast<double>(me) + static_cast<double>(log_ni) +
                    2.0 * static_cast<double>(log_nf)) / 2.0;
        };
        for (unsigned cand = 2; cand <= 256; cand *= 2) {
            if (induced(cand) <= -40.0) {
                m_e = cand;
                break;
            }
        }
        if (m_e == 0)
            throw SizingError("solve_trevisan_params: no power-of-two m_e <= 256 reaches the "
                              "default security floor");
        eps = induced(m_e);
        // the induced eps closes the codeword-length equation exactly
        const double need = static_cast<double>(log_ni) + 2.0 * static_cast<double>(log_nf) -
                            2.0 * eps + 4.0;
        if (static_cast<unsigned>(std::ceil(need)) != m_e)
            throw SizingError("solve_trevisan_params: induced epsilon does not close the "
                              "codeword bound");
    }
    if (m_e < 2) m_e = 2;

    const unsigned m_d = ceil_log2(2ull * m_e);
    const int b_signed = static_cast<int>(ceil_log2(n_f)) - static_cast<int>(m_d) + 1;
    if (b_signed < 1)
        throw SizingError("solve_trevisan_params: block count would be " +
                          std::to_string(b_signed) + "; n_f too small for this field");
    const unsigned b = static_cast<unsigned>(b_signed);
    const std::uint64_t d = (std::uint64_t{1} << (2 * m_d)) * b;

    TrevisanParams p;
    p.n_i = n_i;
    p.n_f = n_f;
    p.k = k_val;
    p.epsilon_log2 = eps;
    p.m_e = m_e;
    p.m_d = m_d;
    p.b = b;
    p.d = d;
    p.rho = trevisan_rho(k_val, n_f, eps, d);
    p.n_bar_log2 = 2 * m_e;
    return p;
}

std::vector<FieldElement> rs_coefficients(const BitVector& message, const FieldSpec& field) {
    const unsigned m = field.degree();
    const std::size_t chunks = (message.size() + m - 1) / m;
    if (m < 63 && chunks > (std::uint64_t{1} << m))
        throw ContractError("rs_coefficients: message has more chunks than field points");
    std::vector<FieldElement> coeffs;
    coeffs.reserve(chunks);
    for (std::size_t c = 0; c < chunks; ++c)
        coeffs.push_back(field.element_from_bits(message, c * m));
    return coeffs;
}

FieldElement rs_symbol(const BitVector& message, FieldElement alpha, const FieldSpec& field) {
    if (alpha.m != field.degree())
        throw ContractError("rs_symbol: evaluation point has the wrong field degree");
    const auto coeffs = rs_coefficients(message, field);
    return field.poly_eval(coeffs, alpha);
}

namespace {
int parity_and(const FieldElement& a, const FieldElement& b) {
    return static_cast<int>((std::popcount(a.lo & b.lo) + std::popcount(a.hi & b.hi)) & 1u);
}
}  // namespace

int codeword_bit(const BitVector& message, const BitVector& u, const FieldSpec& field) {
    const unsigned m = field.degree();
    if (u.size() != 2ull * m)
        throw ContractError("codeword_bit: index must have 2*m_e = " + std::to_string(2 * m) +
                            " bits, got " + std::to_string(u.size()));
    const FieldElement alpha = field.element_from_bits(u, 0);
    const FieldElement r = field.element_from_bits(u, m);
    const FieldElement sym = rs_symbol(message, alpha, field);
    return parity_and(sym, r);
}

WeakDesign WeakDesign::build(const TrevisanParams& params) {
    if (params.m_d < 1 || params.m_d > 10)
        throw ContractError("WeakDesign: design field degree out of supported range 1..10");
    const std::uint64_t q = std::uint64_t{1} << params.m_d;
    if (2ull * params.m_e > q)
        throw ContractError("WeakDesign: design field has fewer points than the 2*m_e columns");
    if (params.b < 1) throw ContractError("WeakDesign: need at least one block");
    if (params.b > 64)
        throw ContractError("WeakDesign: more than 64 blocks is not supported");
    if (params.d != q * q * params.b)
        throw ContractError("WeakDesign: seed length d inconsistent with q^2 * b");
    if (params.n_f == 0) throw ContractError("WeakDesign: n_f must be positive");

    WeakDesign wd;
    wd.n_f_ = params.n_f;
    wd.d_ = params.d;
    wd.q_ = q;
    wd.m_d_ = params.m_d;
    wd.set_size_ = 2 * params.m_e;

    std::uint64_t placed = 0;
    for (unsigned t = 1; t <= params.b && placed < params.n_f; ++t) {
        std::uint64_t capacity = (t == 1) ? std::min(q, params.n_f)
                                          : (params.n_f >> (t - 1));
        // never more sets than distinct polynomials of degree < t
        std::uint64_t avail = 1;
        for (unsigned j = 0; j < t && avail < params.n_f + 1; ++j) avail *= q;
        capacity = std::min({capacity, avail, params.n_f - placed});
        if (capacity == 0) continue;
        Block blk;
        blk.degree = t;
        blk.first_set = placed;
        blk.count = capacity;
        blk.seed_offset = static_cast<std::uint64_t>(t - 1) * q * q;
        wd.blocks_.push_back(blk);
        placed += capacity;
    }
    if (placed < params.n_f)
        throw ContractError("WeakDesign: capacity shortfall, " +
                            std::to_string(params.n_f - placed) +
                            " sets cannot be placed in " + std::to_string(params.b) + " blocks");

    // dense multiplication table for the small design field
    const FieldSpec gf = FieldSpec::standard(params.m_d);
    wd.mul_table_.assign(static_cast<std::size_t>(q * q), 0);
    for (std::uint64_t a = 0; a < q; ++a)
        for (std::uint64_t b2 = 0; b2 < q; ++b2)
            wd.mul_table_[static_cast<std::size_t>(a * q + b2)] =
                static_cast<std::uint16_t>(gf.mul(gf.element(a), gf.element(b2)).lo);
    return wd;
}

std::uint16_t WeakDesign::gf_small_mul(std::uint16_t a, std::uint16_t b) const {
    if (detail::g_count_ops.load(std::memory_order_relaxed))
        detail::gf_op_tally_mul(m_d_);
    return mul_table_[static_cast<std::size_t>(a) * q_ + b];
}

std::vector<DesignBlockInfo> WeakDesign::block_summary() const {
    std::vector<DesignBlockInfo> out;
    out.reserve(blocks_.size());
    for (const auto& blk : blocks_)
        out.push_back({blk.degree, blk.first_set, blk.count, blk.seed_offset});
    return out;
}

unsigned WeakDesign::block_of(std::uint64_t i) const {
    for (const auto& blk : blocks_)
        if (i >= blk.first_set && i < blk.first_set + blk.count) return blk.degree;
    throw ContractError("WeakDesign: set index " + std::to_string(i) + " out of range");
}

void WeakDesign::indices_of(std::uint64_t i, std::vector<std::uint64_t>& out) const {
    const Block* blk = nullptr;
    for (const auto& bb : blocks_)
        if (i >= bb.first_set && i < bb.first_set + bb.count) {
            blk = &bb;
            break;
        }
    if (blk == nullptr)
        throw ContractError("WeakDesign: set index " + std::to_string(i) + " out of range");

    // base-q digits of the local index are the polynomial coefficients,
    // constant term first
    std::uint16_t coeffs[64];
    std::uint64_t rem = i - blk->first_set;
    for (unsigned j = 0; j < blk->degree; ++j) {
        coeffs[j] = static_cast<std::uint16_t>(rem % q_);
        rem /= q_;
    }
    out.resize(set_size_);
    for (std::size_t x = 0; x < set_size_; ++x) {
        // Horner over GF(q) at the point with integer encoding x
        std::uint16_t v = coeffs[blk->degree - 1];
        for (unsigned j = blk->degree - 1; j-- > 0;)
            v = static_cast<std::uint16_t>(gf_small_mul(v, static_cast<std::uint16_t>(x)) ^
                                           coeffs[j]);
        out[x] = blk->seed_offset + static_cast<std::uint64_t>(x) * q_ + v;
    }
}

std::vector<std::uint64_t> WeakDesign::indices_of(std::uint64_t i) const {
    std::vector<std::uint64_t> out;
    indices_of(i, out);
    return out;
}

namespace {

struct Key128 {
    std::uint64_t lo, hi;
    bool operator==(const Key128&) const = default;
};

struct Key128Hash {
    std::size_t operator()(const Key128& k) const {
        // splitmix-style mix of both limbs
        std::uint64_t z = k.lo + 0x9e3779b97f4a7c15ull * (k.hi + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return static_cast<std::size_t>(z ^ (z >> 31));
    }
};

// Memoizes RS symbols per evaluation point; safe for concurrent lookups and
// insert-if-absent.
class SymbolCache {
public:
    bool lookup(const Key128& key, FieldElement& out) const {
        std::shared_lock lock(mutex_);
        auto it = map_.find(key);
        if (it == map_.end()) return false;
        out = it->second;
        return true;
    }
    void insert(const Key128& key, const FieldElement& value) {
        std::unique_lock lock(mutex_);
        map_.emplace(key, value);
    }

private:
    mutable std::shared_mutex mutex_;
    std::unordered_map<Key128, FieldElement, Key128Hash> map_;
};

FieldElement element_from_positions(const BitVector& seed, std::span<const std::uint64_t> pos,
                                    unsigned m) {
    std::uint64_t lo = 0, hi = 0;
    for (unsigned j = 0; j < m; ++j) {
        if (!seed.bit(pos[j])) continue;
        const unsigned p = m - 1 - j;
        if (p < 64)
            lo |= 1ull << p;
        else
            hi |= 1ull << (p - 64);
    }
    return FieldElement{lo, hi, static_cast<std::uint8_t>(m)};
}

}  // namespace

BitVector trevisan_extract(const BitVector& message, const BitVector& seed,
                           const TrevisanParams& params, const WeakDesign& design,
                           unsigned n_threads) {
    if (message.size() != params.n_i)
        throw ContractError("trevisan_extract: message must have n_i = " +
                            std::to_string(params.n_i) + " bits");
    if (seed.size() != params.d)
        throw ContractError("trevisan_extract: seed must have d = " + std::to_string(params.d) +
                            " bits, got " + std::to_string(seed.size()));
    if (design.set_count() != params.n_f || design.seed_bits() != params.d ||
        design.set_size() != 2ull * params.m_e)
        throw ContractError("trevisan_extract: design was built for different parameters");
    if (params.m_e > 128)
        throw ContractError("trevisan_extract: field degree m_e > 128 is not executable");

    const FieldSpec field = FieldSpec::standard(params.m_e);
    const auto coeffs = rs_coefficients(message, field);
    const unsigned m_e = params.m_e;

    SymbolCache cache;
    std::vector<std::uint8_t> out_bytes((params.n_f + 7) / 8, 0);

    auto run_range = [&](std::uint64_t first, std::uint64_t last) {
        std::vector<std::uint64_t> idx;
        for (std::uint64_t i = first; i < last; ++i) {
            design.indices_of(i, idx);
            const FieldElement alpha =
                element_from_positions(seed, std::span(idx).first(m_e), m_e);
            const FieldElement r =
                element_from_positions(seed, std::span(idx).subspan(m_e, m_e), m_e);
            const Key128 key{alpha.lo, alpha.hi};
            FieldElement sym;
            if (!cache.lookup(key, sym)) {
                sym = field.poly_eval(coeffs, alpha);
                cache.insert(key, sym);
            }
            if (parity_and(sym, r))
                out_bytes[i / 8] |= static_cast<std::uint8_t>(1u << (7 - i % 8));
        }
    };

    if (n_threads <= 1 || params.n_f < 64) {
        run_range(0, params.n_f);
    } else {
        // byte-aligned slices so workers touch disjoint output bytes
        const std::uint64_t total_bytes = (params.n_f + 7) / 8;
        const std::uint64_t per = (total_bytes + n_threads - 1) / n_threads;
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n_threads; ++t) {
            const std::uint64_t first = std::min<std::uint64_t>(t * per * 8, params.n_f);
            const std::uint64_t last = std::min<std::uint64_t>((t + 1) * per * 8, params.n_f);
            if (first >= last) break;
            pool.emplace_back(run_range, first, last);
        }
        for (auto& th : pool) th.join();
    }
    return BitVector::from_bytes(out_bytes, params.n_f);
}

}  // namespace qrx
