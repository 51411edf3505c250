#include "expstable/measure.hpp"

#include <algorithm>
#include <cmath>

#include "expstable/errors.hpp"
#include "expstable/quadrature.hpp"

namespace expstable {

namespace {

constexpr std::size_t kMaxAtoms = 100'000'000;

void validate_atoms(const std::vector<Atom>& atoms) {
    if (atoms.size() > kMaxAtoms) {
        throw ConfigurationError("configuration exceeds the atom cap");
    }
    for (const Atom& a : atoms) {
        if (!std::isfinite(a.position)) {
            throw ConfigurationError("atom position must be finite");
        }
        if (!(a.mass > 0.0) || !std::isfinite(a.mass)) {
            throw ConfigurationError("atom mass must be positive and finite");
        }
    }
}

}  // namespace

void Window::validate() const {
    if (std::isnan(lo) || std::isnan(hi) || !(lo < hi)) {
        throw ConfigurationError("window requires lo < hi");
    }
}

PointConfiguration PointConfiguration::from_sorted(std::vector<Atom> atoms,
                                                   std::optional<Window> window) {
    validate_atoms(atoms);
    if (!std::is_sorted(atoms.begin(), atoms.end(),
                        [](const Atom& a, const Atom& b) { return a.position < b.position; })) {
        throw ConfigurationError("atoms are not sorted by position");
    }
    if (window) window->validate();
    PointConfiguration cfg;
    cfg.atoms_ = std::move(atoms);
    cfg.window_ = window;
    return cfg;
}

PointConfiguration PointConfiguration::from_unsorted(std::vector<Atom> atoms,
                                                     std::optional<Window> window) {
    validate_atoms(atoms);
    std::stable_sort(atoms.begin(), atoms.end(),
                     [](const Atom& a, const Atom& b) { return a.position < b.position; });
    if (window) window->validate();
    PointConfiguration cfg;
    cfg.atoms_ = std::move(atoms);
    cfg.window_ = window;
    return cfg;
}

double PointConfiguration::total_mass() const {
    double total = 0.0;
    for (const Atom& a : atoms_) total += a.mass;
    return total;
}

PointConfiguration PointConfiguration::with_window(std::optional<Window> window) const {
    if (window) window->validate();
    PointConfiguration cfg = *this;
    cfg.window_ = window;
    return cfg;
}

TestFunction indicator_function(double lo, double hi) {
    Window support{lo, hi};
    support.validate();
    TestFunction f;
    f.id = "ind[" + std::to_string(lo) + "," + std::to_string(hi) + "]";
    f.eval = [lo, hi](double x) { return (x >= lo && x <= hi) ? 1.0 : 0.0; };
    f.support = support;
    f.decay = DecayClass::compact_support;
    f.breakpoints = {lo, hi};
    return f;
}

TestFunction triangle_function(double lo, double hi) {
    Window support{lo, hi};
    support.validate();
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    TestFunction f;
    f.id = "tri[" + std::to_string(lo) + "," + std::to_string(hi) + "]";
    f.eval = [lo, hi, mid, half](double x) {
        if (x <= lo || x >= hi) return 0.0;
        return 1.0 - std::abs(x - mid) / half;
    };
    f.support = support;
    f.decay = DecayClass::compact_support;
    f.breakpoints = {lo, mid, hi};
    return f;
}

PointConfiguration translate(const PointConfiguration& mu, double x) {
    std::vector<Atom> shifted = mu.atoms();
    for (Atom& a : shifted) a.position += x;
    std::optional<Window> window = mu.window();
    if (window) {
        window->lo += x;
        window->hi += x;
    }
    return PointConfiguration::from_sorted(std::move(shifted), window);
}

double rightmost(const PointConfiguration& mu) {
    const auto& atoms = mu.atoms();
    if (atoms.empty()) return kInf;
    const double threshold = std::min(1.0, mu.total_mass() / 2.0);

    // Walk groups of equal positions right to left; `above` is the mass
    // strictly to the right of the current group. The answer is the
    // leftmost group position at which `above` is still below threshold.
    double above = 0.0;
    double answer = kInf;
    std::ptrdiff_t i = static_cast<std::ptrdiff_t>(atoms.size()) - 1;
    while (i >= 0) {
        const double pos = atoms[static_cast<std::size_t>(i)].position;
        double group_mass = 0.0;
        std::ptrdiff_t j = i;
        while (j >= 0 && atoms[static_cast<std::size_t>(j)].position == pos) {
            group_mass += atoms[static_cast<std::size_t>(j)].mass;
            --j;
        }
        if (above < threshold) {
            answer = pos;
        } else {
            break;
        }
        above += group_mass;
        i = j;
    }
    return answer;
}

double pair(const PointConfiguration& mu, const TestFunction& f, double density_coeff) {
    if (density_coeff < 0.0) {
        throw ConfigurationError("density coefficient must be non-negative");
    }
    double atom_sum = 0.0;
    for (const Atom& a : mu.atoms()) atom_sum += a.mass * f.eval(a.position);
    if (density_coeff == 0.0) return atom_sum;
    return atom_sum + density_coeff * integrate_exp_weighted(f);
}

PointConfiguration exp_transform(const PointConfiguration& mu) {
    std::vector<Atom> mapped = mu.atoms();
    for (Atom& a : mapped) a.position = std::exp(a.position);
    std::optional<Window> window = mu.window();
    if (window) {
        window->lo = std::exp(window->lo);
        window->hi = std::exp(window->hi);
    }
    return PointConfiguration::from_sorted(std::move(mapped), window);
}

PointConfiguration restrict(const PointConfiguration& mu, const Window& w) {
    w.validate();
    const auto& atoms = mu.atoms();
    auto first = std::lower_bound(atoms.begin(), atoms.end(), w.lo,
                                  [](const Atom& a, double lo) { return a.position < lo; });
    auto last = std::upper_bound(atoms.begin(), atoms.end(), w.hi,
                                 [](double hi, const Atom& a) { return hi < a.position; });
    if (first > last) first = last;
    return PointConfiguration::from_sorted(std::vector<Atom>(first, last), w);
}

PointConfiguration merge_equal_positions(const PointConfiguration& mu) {
    std::vector<Atom> merged;
    merged.reserve(mu.size());
    for (const Atom& a : mu.atoms()) {
        if (!merged.empty() && merged.back().position == a.position) {
            merged.back().mass += a.mass;
        } else {
            merged.push_back(a);
        }
    }
    return PointConfiguration::from_sorted(std::move(merged), mu.window());
}

TestFunction shift_test_function(const TestFunction& f, double x) {
    TestFunction shifted;
    shifted.id = f.id + "<<" + std::to_string(x);
    auto base = f.eval;
    shifted.eval = [base, x](double y) { return base(y + x); };
    shifted.support = Window{f.support.lo - x, f.support.hi - x};
    shifted.decay = f.decay;
    shifted.breakpoints.reserve(f.breakpoints.size());
    for (double b : f.breakpoints) shifted.breakpoints.push_back(b - x);
    return shifted;
}

}  // namespace expstable
