#include "geoflow/rootdata.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>

#include "geoflow/error.hpp"

namespace geoflow::rootdata {

std::string GroupDesc::name() const {
    return std::string(family == Family::B ? "B" : "D") + std::to_string(rank);
}

bool is_dominant(const GroupDesc& group, const Weight& w) {
    if (static_cast<int>(w.size()) != group.rank || !w.uniform_parity()) return false;
    const int r = group.rank;
    if (group.family == Family::B) {
        for (int i = 0; i + 1 < r; ++i)
            if (w.twice(i) < w.twice(i + 1)) return false;
        return w.twice(r - 1) >= 0;
    }
    if (r == 1) return true;
    for (int i = 0; i + 2 < r; ++i)
        if (w.twice(i) < w.twice(i + 1)) return false;
    return w.twice(r - 2) >= std::abs(w.twice(r - 1));
}

Irrep Irrep::make(GroupDesc group, Weight weight) {
    if (group.rank < 1) throw InputError("group rank must be positive");
    if (static_cast<int>(weight.size()) != group.rank)
        throw InputError("weight " + weight.str() + " has " + std::to_string(weight.size()) +
                         " entries, expected " + std::to_string(group.rank) + " for " +
                         group.name());
    if (!weight.uniform_parity())
        throw InputError("weight " + weight.str() + " mixes integers and half-integers");
    if (!is_dominant(group, weight))
        throw InputError("weight " + weight.str() + " is not dominant for " + group.name());
    return Irrep{group, std::move(weight)};
}

Irrep Irrep::trivial(GroupDesc group) { return Irrep{group, Weight::zero(group.rank)}; }

// ---------------------------------------------------------------------------
// Root data

Weight rho(const GroupDesc& group) {
    const int r = group.rank;
    std::vector<int> twice(r);
    for (int i = 0; i < r; ++i)
        twice[i] = group.family == Family::B ? 2 * (r - i) - 1 : 2 * (r - 1 - i);
    return Weight(std::move(twice));
}

std::vector<Weight> positive_roots(const GroupDesc& group) {
    const int r = group.rank;
    std::vector<Weight> roots;
    for (int i = 0; i < r; ++i) {
        for (int j = i + 1; j < r; ++j) {
            std::vector<int> minus(r, 0), plus(r, 0);
            minus[i] = 2;
            minus[j] = -2;
            plus[i] = 2;
            plus[j] = 2;
            roots.emplace_back(std::move(minus));
            roots.emplace_back(std::move(plus));
        }
        if (group.family == Family::B) {
            std::vector<int> shortroot(r, 0);
            shortroot[i] = 2;
            roots.emplace_back(std::move(shortroot));
        }
    }
    return roots;
}

long long weyl_dim(const Irrep& rep) {
    const Weight shifted = rep.weight + rho(rep.group);
    const Weight r = rho(rep.group);
    __int128 num = 1, den = 1;
    for (const auto& alpha : positive_roots(rep.group)) {
        num *= dot4(shifted, alpha);
        den *= dot4(r, alpha);
        const __int128 a = num < 0 ? -num : num;
        __int128 g = den, h = a;
        while (h != 0) {
            const __int128 t = g % h;
            g = h;
            h = t;
        }
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }
    if (den != 1) throw InternalError("Weyl dimension is not integral for " + rep.str());
    return static_cast<long long>(num);
}

// ---------------------------------------------------------------------------
// Weyl group helpers

Weight dominant_conjugate(const GroupDesc& group, const Weight& w) {
    if (group.family == Family::D && group.rank == 1) return w;
    std::vector<int> a(w.twice());
    int negatives = 0;
    for (int& x : a) {
        if (x < 0) {
            ++negatives;
            x = -x;
        }
    }
    std::sort(a.begin(), a.end(), std::greater<>());
    if (group.family == Family::D && negatives % 2 == 1) a.back() = -a.back();
    return Weight(std::move(a));
}

std::optional<std::pair<Weight, int>> reflect_to_dominant(const GroupDesc& group,
                                                          const Weight& v) {
    if (group.family == Family::D && group.rank == 1) return std::make_pair(v, 1);
    const auto n = v.size();
    int negatives = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (v.twice(i) < 0) ++negatives;
        if (group.family == Family::B && v.twice(i) == 0) return std::nullopt;
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(v.twice(i)) == std::abs(v.twice(j))) return std::nullopt;
    }
    int inversions = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(v.twice(i)) < std::abs(v.twice(j))) ++inversions;
    int sign = inversions % 2 == 0 ? 1 : -1;
    if (group.family == Family::B && negatives % 2 == 1) sign = -sign;
    return std::make_pair(dominant_conjugate(group, v), sign);
}

namespace {

std::vector<Weight> weyl_orbit(const GroupDesc& group, const Weight& w) {
    if (group.family == Family::D && group.rank == 1) return {w};
    const int r = group.rank;
    std::vector<int> perm(r);
    std::iota(perm.begin(), perm.end(), 0);
    std::set<Weight> orbit;
    do {
        for (unsigned mask = 0; mask < (1u << r); ++mask) {
            if (group.family == Family::D && std::popcount(mask) % 2 == 1) continue;
            std::vector<int> img(r);
            for (int i = 0; i < r; ++i)
                img[i] = (mask >> i & 1u) ? -w.twice(perm[i]) : w.twice(perm[i]);
            orbit.insert(Weight(std::move(img)));
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return {orbit.begin(), orbit.end()};
}

// Coefficients of v in the simple-root basis, doubled; nullopt if any is negative.
std::optional<long> level_if_nonnegative(const GroupDesc& group, const Weight& v) {
    const int r = group.rank;
    std::vector<long> partial(r);
    long s = 0;
    for (int i = 0; i < r; ++i) {
        s += v.twice(i);
        partial[i] = s;
    }
    if (group.family == Family::D && r == 1) {
        if (partial[0] != 0) return std::nullopt;
        return 0;
    }
    long level = 0;
    if (group.family == Family::B) {
        for (long p : partial) {
            if (p < 0) return std::nullopt;
            level += p;
        }
        return level;
    }
    for (int i = 0; i + 2 < r; ++i) {
        if (partial[i] < 0) return std::nullopt;
        level += partial[i];
    }
    const long last = partial[r - 1];
    const long second = 2 * partial[r - 2] - last;
    if (last < 0 || second < 0) return std::nullopt;
    return level + partial[r - 2];
}

WeightTable freudenthal(const Irrep& rep) {
    const auto& group = rep.group;
    const auto roots = positive_roots(group);
    const Weight& top = rep.weight;

    std::map<Weight, long> levels{{top, 0}};
    std::vector<Weight> frontier{top};
    while (!frontier.empty()) {
        const Weight mu = frontier.back();
        frontier.pop_back();
        for (const auto& alpha : roots) {
            Weight next = mu - alpha;
            if (!is_dominant(group, next) || levels.contains(next)) continue;
            const auto level = level_if_nonnegative(group, top - next);
            if (!level) continue;
            levels.emplace(next, *level);
            frontier.push_back(std::move(next));
        }
    }

    std::vector<std::pair<long, Weight>> order;
    order.reserve(levels.size());
    for (const auto& [w, level] : levels) order.emplace_back(level, w);
    std::sort(order.begin(), order.end());

    const Weight r = rho(group);
    const Weight top_shift = top + r;
    const long top_norm = dot4(top_shift, top_shift);
    std::map<Weight, long> dominant_mult;
    for (const auto& [level, mu] : order) {
        if (level == 0) {
            dominant_mult[mu] = 1;
            continue;
        }
        long num = 0;
        for (const auto& alpha : roots) {
            Weight shifted = mu + alpha;
            while (true) {
                const auto it = dominant_mult.find(dominant_conjugate(group, shifted));
                if (it == dominant_mult.end()) break;
                num += it->second * dot4(shifted, alpha);
                shifted += alpha;
            }
        }
        const Weight mu_shift = mu + r;
        const long den = top_norm - dot4(mu_shift, mu_shift);
        // Both sides carry the same factor 4; the recursion has an explicit 2.
        if (den <= 0 || (2 * num) % den != 0)
            throw InternalError("Freudenthal recursion is not integral at " + mu.str());
        const long m = 2 * num / den;
        if (m != 0) dominant_mult[mu] = m;
    }

    WeightTable table;
    for (const auto& [mu, m] : dominant_mult)
        for (auto& w : weyl_orbit(group, mu)) table[std::move(w)] = m;
    return table;
}

std::mutex cache_mutex;
std::map<std::pair<GroupDesc, Weight>, std::unique_ptr<const WeightTable>> table_cache;

}  // namespace

const WeightTable& weight_multiplicities(const Irrep& rep) {
    const auto key = std::make_pair(rep.group, rep.weight);
    {
        std::lock_guard lock(cache_mutex);
        if (auto it = table_cache.find(key); it != table_cache.end()) return *it->second;
    }
    auto table = std::make_unique<const WeightTable>(freudenthal(rep));
    std::lock_guard lock(cache_mutex);
    auto [it, inserted] = table_cache.try_emplace(key, std::move(table));
    return *it->second;
}

std::complex<double> character(const WeightTable& table, std::span<const double> angles) {
    std::complex<double> sum{0.0, 0.0};
    for (const auto& [mu, m] : table) {
        double phase = 0.0;
        for (std::size_t j = 0; j < mu.size(); ++j) phase += mu.coord(j) * angles[j];
        sum += static_cast<double>(m) * std::polar(1.0, phase);
    }
    return sum;
}

std::complex<double> character(const Irrep& rep, const TorusElement& t) {
    if (t.angles.size() != rep.weight.size())
        throw InputError("torus element has wrong dimension for " + rep.group.name());
    return character(weight_multiplicities(rep), t.angles);
}

std::complex<double> character(const VirtualRep& rep, const TorusElement& t) {
    std::complex<double> sum{0.0, 0.0};
    for (const auto& [w, c] : rep.terms())
        sum += static_cast<double>(c) * character(Irrep{rep.group(), w}, t);
    return sum;
}

// ---------------------------------------------------------------------------
// Virtual representations

VirtualRep::VirtualRep(const Irrep& irrep, long coeff) : group_(irrep.group) {
    add(irrep.weight, coeff);
}

long VirtualRep::coefficient(const Weight& w) const {
    const auto it = terms_.find(w);
    return it == terms_.end() ? 0 : it->second;
}

void VirtualRep::add(const Weight& highest, long coeff) {
    if (coeff == 0) return;
    if (!is_dominant(group_, highest))
        throw InputError("weight " + highest.str() + " is not dominant for " + group_.name());
    auto [it, inserted] = terms_.try_emplace(highest, coeff);
    if (!inserted) {
        it->second += coeff;
        if (it->second == 0) terms_.erase(it);
    }
}

VirtualRep& VirtualRep::operator+=(const VirtualRep& other) {
    if (!(other.group_ == group_)) throw InputError("adding virtual representations of different groups");
    for (const auto& [w, c] : other.terms_) add(w, c);
    return *this;
}

VirtualRep& VirtualRep::operator-=(const VirtualRep& other) {
    if (!(other.group_ == group_)) throw InputError("subtracting virtual representations of different groups");
    for (const auto& [w, c] : other.terms_) add(w, -c);
    return *this;
}

VirtualRep VirtualRep::scaled(long factor) const {
    VirtualRep out(group_);
    for (const auto& [w, c] : terms_) out.add(w, c * factor);
    return out;
}

long long VirtualRep::dim() const {
    long long d = 0;
    for (const auto& [w, c] : terms_) d += c * weyl_dim(Irrep{group_, w});
    return d;
}

long long VirtualRep::character_bound() const {
    long long d = 0;
    for (const auto& [w, c] : terms_) d += std::abs(c) * weyl_dim(Irrep{group_, w});
    return d;
}

WeightTable VirtualRep::weight_table() const {
    WeightTable out;
    for (const auto& [w, c] : terms_) {
        for (const auto& [mu, m] : weight_multiplicities(Irrep{group_, w})) {
            auto& slot = out[mu];
            slot += c * m;
        }
    }
    std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
    return out;
}

std::string VirtualRep::str() const {
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        if (!first) os << ' ';
        first = false;
        os << it->first.str() << ':' << (it->second > 0 ? "+" : "") << it->second;
    }
    return os.str();
}

VirtualRep decompose(const GroupDesc& group, const WeightTable& table) {
    WeightTable rest = table;
    std::erase_if(rest, [](const auto& kv) { return kv.second == 0; });
    VirtualRep out(group);
    std::size_t guard = 0;
    while (!rest.empty()) {
        if (++guard > 100000) throw InternalError("weight peeling does not terminate");
        const auto [top, c] = *rest.rbegin();
        if (!is_dominant(group, top))
            throw InternalError("weight multiset is not a character: top weight " + top.str());
        out.add(top, c);
        for (const auto& [mu, m] : weight_multiplicities(Irrep{group, top})) {
            auto it = rest.find(mu);
            if (it == rest.end()) {
                rest.emplace(mu, -c * m);
            } else {
                it->second -= c * m;
                if (it->second == 0) rest.erase(it);
            }
        }
    }
    return out;
}

VirtualRep tensor(const VirtualRep& a, const VirtualRep& b) {
    if (!(a.group() == b.group())) throw InputError("tensor product of different groups");
    const auto ta = a.weight_table();
    const auto tb = b.weight_table();
    WeightTable prod;
    for (const auto& [u, mu] : ta)
        for (const auto& [v, mv] : tb) prod[u + v] += mu * mv;
    return decompose(a.group(), prod);
}

// ---------------------------------------------------------------------------
// M-representation operations

namespace {

void require_M(const Irrep& sigma, const char* op) {
    if (sigma.group.family != Family::D)
        throw InputError(std::string(op) + " expects an irreducible representation of M (type D)");
}

}  // namespace

Irrep w0_act(const Irrep& sigma) {
    require_M(sigma, "w0_act");
    std::vector<int> t(sigma.weight.twice());
    t.back() = -t.back();
    return Irrep{sigma.group, Weight(std::move(t))};
}

Irrep contragredient(const Irrep& sigma) {
    require_M(sigma, "contragredient");
    return sigma.group.rank % 2 == 0 ? sigma : w0_act(sigma);
}

Rational casimir_shift(const Irrep& sigma) {
    require_M(sigma, "casimir_shift");
    const int n = sigma.group.rank;
    const Weight shifted = sigma.weight + rho(sigma.group);
    Rational c{dot4(shifted, shifted), 4};
    std::int64_t rho_sq = 0;
    for (int j = 1; j <= n + 1; ++j) rho_sq += static_cast<std::int64_t>(n + 1 - j) * (n + 1 - j);
    return c - Rational(rho_sq);
}

VirtualRep branch_K_to_M(const Irrep& nu) {
    if (nu.group.family != Family::B) throw InputError("branch_K_to_M expects a K-representation");
    const int n = nu.group.rank;
    VirtualRep out(GroupDesc::M(n));
    std::vector<int> current(n);
    auto recurse = [&](auto&& self, int i) -> void {
        if (i == n - 1) {
            for (int t = -nu.weight.twice(i); t <= nu.weight.twice(i); t += 2) {
                current[i] = t;
                out.add(Weight(current), 1);
            }
            return;
        }
        for (int t = nu.weight.twice(i + 1); t <= nu.weight.twice(i); t += 2) {
            current[i] = t;
            self(self, i + 1);
        }
    };
    recurse(recurse, 0);
    return out;
}

VirtualRep restrict_to_M(const VirtualRep& k_rep) {
    VirtualRep out(GroupDesc::M(k_rep.group().rank));
    for (const auto& [w, c] : k_rep.terms())
        out += branch_K_to_M(Irrep{k_rep.group(), w}).scaled(c);
    return out;
}

Irrep nu_sigma(const Irrep& sigma) {
    require_M(sigma, "nu_sigma");
    std::vector<int> t(sigma.weight.twice());
    t.back() = std::abs(t.back());
    return Irrep{GroupDesc::K(sigma.group.rank), Weight(std::move(t))};
}

Irrep nu_of_sigma(const Irrep& sigma) {
    require_M(sigma, "nu_of_sigma");
    if (sigma.weight.twice().back() <= 0)
        throw InputError("nu(sigma) requires k_{n+1}(sigma) > 0, got " + sigma.str());
    std::vector<int> t(sigma.weight.twice());
    for (int& x : t) x -= 1;
    return Irrep::make(GroupDesc::K(sigma.group.rank), Weight(std::move(t)));
}

SpinReps spin_reps(int n) {
    if (n < 1) throw InputError("spin_reps requires n >= 1");
    std::vector<int> half(n, 1);
    std::vector<int> minus = half;
    minus.back() = -1;
    return SpinReps{Irrep{GroupDesc::K(n), Weight(half)}, Irrep{GroupDesc::M(n), Weight(half)},
                    Irrep{GroupDesc::M(n), Weight(minus)}};
}

VirtualRep tensor_with_spin(const Irrep& nu) {
    if (nu.group.family != Family::B) throw InputError("tensor_with_spin expects a K-representation");
    const int n = nu.group.rank;
    const Weight r = rho(nu.group);
    VirtualRep out(nu.group);
    // Klimyk: sum over weights mu of kappa of det(w) V(w(nu+mu+rho)-rho).
    for (const auto& [mu, m] : weight_multiplicities(spin_reps(n).kappa)) {
        const auto reflected = reflect_to_dominant(nu.group, nu.weight + mu + r);
        if (!reflected) continue;
        out.add(reflected->first - r, reflected->second * m);
    }
    return out;
}

SplitResult split_nu_pm(const Irrep& sigma) {
    require_M(sigma, "split_nu_pm");
    const Irrep base = nu_of_sigma(sigma);
    const VirtualRep product = tensor_with_spin(base);

    std::vector<Weight> components;
    for (const auto& [w, c] : product.terms()) {
        if (c < 0) throw InternalError("negative multiplicity in nu(sigma) (x) kappa");
        for (long i = 0; i < c; ++i) components.push_back(w);
    }
    std::vector<VirtualRep> restricted;
    for (const auto& w : components) restricted.push_back(branch_K_to_M(Irrep{base.group, w}));

    const VirtualRep target = VirtualRep(sigma) + VirtualRep(w0_act(sigma));
    std::optional<SplitResult> found;
    const auto count = components.size();
    for (unsigned long mask = 0; mask < (1ul << count); ++mask) {
        VirtualRep image(sigma.group);
        for (std::size_t i = 0; i < count; ++i) {
            if (mask >> i & 1ul)
                image -= restricted[i];
            else
                image += restricted[i];
        }
        if (!(image == target)) continue;
        SplitResult candidate{VirtualRep(base.group), VirtualRep(base.group)};
        for (std::size_t i = 0; i < count; ++i)
            (mask >> i & 1ul ? candidate.nu_minus : candidate.nu_plus).add(components[i], 1);
        if (found && !(found->nu_plus == candidate.nu_plus))
            throw InternalError("sign assignment for " + sigma.str() + " is not unique");
        found = std::move(candidate);
    }
    if (!found) throw InternalError("no sign assignment splits nu(sigma) (x) kappa for " + sigma.str());
    return *found;
}

VirtualRep m_coeffs(const Irrep& sigma) {
    require_M(sigma, "m_coeffs");
    const int n = sigma.group.rank;
    VirtualRep target(sigma);
    const Irrep flipped = w0_act(sigma);
    if (!(flipped == sigma)) target += VirtualRep(flipped);

    VirtualRep out(GroupDesc::K(n));
    std::size_t guard = 0;
    while (!target.empty()) {
        if (++guard > 100000) throw InternalError("m_coeffs elimination does not terminate");
        const auto [top, c] = *target.terms().rbegin();
        const Irrep nu{GroupDesc::K(n), top};
        if (!is_dominant(nu.group, top))
            throw InternalError("top weight " + top.str() + " of the target is not K-dominant");
        out.add(top, c);
        target -= branch_K_to_M(nu).scaled(c);
    }
    for (const auto& [w, c] : out.terms())
        if (c < -1 || c > 1)
            throw InternalError("m_nu(" + sigma.str() + ") outside {-1,0,1} at " + w.str());
    return out;
}

VirtualRep lambda_p_nbar(int n, int p) {
    if (n < 1 || p < 0 || p > 2 * n) throw InputError("lambda_p_nbar requires 0 <= p <= 2n");
    std::vector<Weight> basis;
    for (int j = 0; j < n; ++j) {
        std::vector<int> e(n, 0);
        e[j] = 2;
        basis.emplace_back(e);
        e[j] = -2;
        basis.emplace_back(e);
    }
    WeightTable table;
    for (unsigned mask = 0; mask < (1u << (2 * n)); ++mask) {
        if (std::popcount(mask) != p) continue;
        Weight sum = Weight::zero(n);
        for (int i = 0; i < 2 * n; ++i)
            if (mask >> i & 1u) sum += basis[i];
        table[sum] += 1;
    }
    return decompose(GroupDesc::M(n), table);
}

}  // namespace geoflow::rootdata
