#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace kahler {

struct LambdaValue {
    double value = 0.0;  // lambda(t)
    double first = 0.0;  // lambda'(t)
};

// A node of a tabulated lambda: value and slope at t.
struct LambdaNode {
    double t;
    double value;
    double first;
};

// The free function lambda(t) of the structure together with the constant A.
//
// Named families carry analytic first and second derivatives. Custom
// families supply (lambda, lambda') only; lambda'' is then obtained by
// differencing lambda'. Objects are immutable after construction.
class LambdaFamily {
public:
    enum class Kind { Constant, PowerPlusConstant, InverseSqrt, Table, Custom };

    // lambda = B
    static LambdaFamily constant(double A, double B);
    // lambda = t^m + B
    static LambdaFamily power_plus_constant(double A, double m, double B);
    // lambda = A / sqrt(2 c t + B)
    static LambdaFamily inverse_sqrt(double A, double c, double B);
    // Cubic Hermite interpolation through the nodes (sorted by t, t[0] = 0).
    static LambdaFamily table(double A, std::vector<LambdaNode> nodes);
    static LambdaFamily custom(double A, std::string name, std::function<LambdaValue(double)> eval);

    Kind kind() const { return kind_; }
    double A() const { return A_; }
    std::string describe() const;

    LambdaValue operator()(double t) const;
    double second_derivative(double t) const;

private:
    struct Impl;
    LambdaFamily(Kind kind, double A, std::shared_ptr<const Impl> impl);

    Kind kind_;
    double A_;
    std::shared_ptr<const Impl> impl_;
};

// Deliberate departures from the Kahler-Einstein structure. They exist so
// that each verification can be shown to detect a broken structure.
struct Perturbation {
    double b1_shift = 0.0;               // b1 -> b1 + shift
    std::optional<double> b1_override;   // b1 -> fixed value (applied before the shift)
    double mu_shift = 0.0;               // mu = lambda' + shift
    double d2_shift = 0.0;               // d2 -> d2 + shift

    bool any() const { return b1_shift != 0.0 || b1_override || mu_shift != 0.0 || d2_shift != 0.0; }
};

struct CoefficientSet {
    double t = 0.0;
    double A = 0.0;
    double c = 0.0;
    double lambda = 0.0;
    double lambda_prime = 0.0;
    double mu = 0.0;
    double a1 = 0.0, a2 = 0.0, b1 = 0.0, b2 = 0.0;
    double c1 = 0.0, c2 = 0.0, d1 = 0.0, d2 = 0.0;
};

// d/dt of the metric coefficients; needed for fibre derivatives of G.
struct CoefficientRates {
    double lambda_second = 0.0;
    double c1 = 0.0, d1 = 0.0, c2 = 0.0, d2 = 0.0;
};

CoefficientSet coefficients(const LambdaFamily& family, double c, double t, const Perturbation& perturbation = {});
CoefficientRates coefficient_rates(const LambdaFamily& family, double c, double t,
                                   const Perturbation& perturbation = {});

// Residuals of the coefficient identities, each relative to the size of the
// terms involved:
//   a1 a2 = 1, (a1 + 2t b1)(a2 + 2t b2) = 1,
//   c1 + 2t d1 = (lambda + 2t mu)(a1 + 2t b1), same for index 2,
//   d1 = -c lambda^2 / A and d2 equal to its Kahler closed form (only when mu = lambda').
struct CoefficientResiduals {
    double almost_complex = 0.0;
    double proportionality = 0.0;
    double kahler_closed_form = 0.0;
    double horizontal_positivity = 0.0;  // A + 2t lambda b1, must be > 0
};
CoefficientResiduals coefficient_residuals(const CoefficientSet& cs);

struct AdmissibilityCondition {
    std::string name;
    bool passed = true;
    std::optional<double> first_failure_t;
    double worst_value = 0.0;  // minimum over the grid of the quantity required to be > 0
};

struct AdmissibilityReport {
    double t_max = 0.0;
    int samples = 0;
    std::vector<AdmissibilityCondition> conditions;
    bool all_passed() const;
    const AdmissibilityCondition* first_failure() const;
};

// Evaluates on t_k = t_max * k / (samples - 1):
//   lambda > 0, A^2 - 2ct lambda^2 > 0, lambda + 2t lambda' > 0,
//   the Hermitian-stage ratio (A^2 - 2ct lambda^2)/(lambda + 2t lambda') > 0,
//   and positivity c1, c2, c1 + 2t d1, c2 + 2t d2 > 0 of the induced metric.
AdmissibilityReport check_admissibility(const LambdaFamily& family, double c, double t_max, int samples = 1001);

// |central difference of lambda at t - lambda'(t)|; one-sided near t = 0.
double fd_lambda_prime_check(const LambdaFamily& family, double t);

}  // namespace kahler
