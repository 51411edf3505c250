#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace expstable {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// A weighted atom on the line. Point-process configurations use integer
// masses (1.0 unless multiplicities were merged).
struct Atom {
    double position = 0.0;
    double mass = 1.0;
};

// Half-open-ended interval [lo, hi]; either end may be infinite, lo < hi.
struct Window {
    double lo = -kInf;
    double hi = kInf;

    void validate() const;
    bool contains(double x) const { return x >= lo && x <= hi; }
};

// A finite configuration of atoms sorted by position (ties keep insertion
// order), optionally tagged with the window it was sampled on. Immutable
// after construction; all operations return new values.
class PointConfiguration {
  public:
    PointConfiguration() = default;

    // Atoms must already be sorted ascending by position.
    static PointConfiguration from_sorted(std::vector<Atom> atoms,
                                          std::optional<Window> window = std::nullopt);
    // Stable-sorts, so equal positions keep their insertion order.
    static PointConfiguration from_unsorted(std::vector<Atom> atoms,
                                            std::optional<Window> window = std::nullopt);

    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::optional<Window>& window() const { return window_; }
    std::size_t size() const { return atoms_.size(); }
    bool empty() const { return atoms_.empty(); }
    double total_mass() const;

    PointConfiguration with_window(std::optional<Window> window) const;

  private:
    std::vector<Atom> atoms_;
    std::optional<Window> window_;
};

// How a test function behaves outside its support hint.
enum class DecayClass {
    compact_support,
    bounded_with_left_decay,
};

// Non-negative function paired against configurations and against the
// exponential reference density. Breakpoints mark kinks so quadrature can
// split there; they must include any support endpoints.
struct TestFunction {
    std::string id;
    std::function<double(double)> eval;
    Window support;
    DecayClass decay = DecayClass::compact_support;
    std::vector<double> breakpoints;

    double operator()(double x) const { return eval(x); }
};

TestFunction indicator_function(double lo, double hi);
TestFunction triangle_function(double lo, double hi);  // unit peak at the midpoint

// (T_x mu)(A) = mu(A - x): shift every atom (and the window) by +x.
PointConfiguration translate(const PointConfiguration& mu, double x);

// Position of the rightmost atom in the threshold sense
//   inf{x : mu((x,inf)) < min(1, mu(R)/2)},
// which for a nonempty counting measure is the largest atom position.
// Returns +inf for the null measure.
double rightmost(const PointConfiguration& mu);

// <mu,f> plus density_coeff * integral of f against e^{-x} dx.
// Throws NonIntegrableError if the density quadrature cannot converge.
double pair(const PointConfiguration& mu, const TestFunction& f, double density_coeff = 0.0);

// Image of mu under x -> e^x; output lives on (0, inf).
PointConfiguration exp_transform(const PointConfiguration& mu);

// Restriction to [w.lo, w.hi]; the result is tagged with w.
PointConfiguration restrict(const PointConfiguration& mu, const Window& w);

// Merge atoms at exactly equal positions into one atom of summed mass.
// Two representations of the same measure compare equal after this step.
PointConfiguration merge_equal_positions(const PointConfiguration& mu);

// Shift a test function: shifted(y) = f(y + x), support moved by -x.
TestFunction shift_test_function(const TestFunction& f, double x);

}  // namespace expstable
