#pragma once

#include <string>
#include <vector>

#include "weakcorr/kinematics.hpp"
#include "weakcorr/state.hpp"
#include "weakcorr/weak_values.hpp"

namespace weakcorr {

/// Dimensionless entanglement indicators built from the local weak values
/// w_i and the weak correlation C^w. Im w_i plays the role of m_i u_i and
/// Re w_i of m_i v_i.
struct EntanglementIndicators {
  double iA_mean = 0.0;  // |C(Im w1, Im w2)| / sqrt(<(Im w1)^2><(Im w2)^2>)
  double iA_sup = 0.0;   // sup|Re C^w| / sqrt(<(Im w1)^2><(Im w2)^2>)
  double iP_mean = 0.0;  // max_ij |C(Im w_i, Re w_j)| / sqrt(<(Im w_i)^2> var(Re w_j))
  double iP_sup = 0.0;   // sup|Im C^w| / sqrt(<(Im w1)^2><(Im w2)^2>)
};

EntanglementIndicators indicators(const WaveFunction& wf, const WeakCorrelationField& cwf);

enum class Classification { product, a_only, p_only, ap };

const char* to_string(Classification c);

struct Verdict {
  Classification classification = Classification::product;
  double tau = 1e-3;
  bool amplitude_flag = false;  // iA_mean or iA_sup above tau
  bool phase_flag = false;      // iP_mean or iP_sup above tau
  bool iA_mean_above = false;
  bool iA_sup_above = false;
  bool iP_mean_above = false;
  bool iP_sup_above = false;
  /// One coordinate per particle: a vanishing weak correlation everywhere
  /// is equivalent to a product state.
  bool is_1d_iff_applicable = true;
};

/// tau must lie in (0, 0.1].
Verdict classify(const EntanglementIndicators& ind, double tau = 1e-3);

struct IdentityResidual {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct IdentityReport {
  std::vector<IdentityResidual> residuals;
  bool all_pass() const;
  /// Throws on an unknown name.
  const IdentityResidual& at(const std::string& name) const;
};

/// Evaluates every two-route identity on wf. Each residual is compared with
/// max(its own tolerance, tolerance_floor).
IdentityReport identity_suite(const WaveFunction& wf, const AnalysisOptions& opts = {},
                              double tolerance_floor = 0.0);

}  // namespace weakcorr
