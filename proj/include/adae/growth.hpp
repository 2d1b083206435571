#pragma once

#include <optional>
#include <string>
#include <vector>

#include "adae/pencil.hpp"

namespace adae {

/// Real sample points on the half-line (omega, inf).
struct LambdaGrid {
  std::vector<double> points;
  double omega = 0.0;

  /// 48 log-spaced points in [1, 1e8].
  static LambdaGrid defaults();
  /// omega + logspace(lo, hi, count).
  static LambdaGrid shifted(double omega, double lo = 1.0, double hi = 1e8, int count = 48);
  void validate() const;
};

enum class CertKind { G, R, Rw, D, dissip, D1_cert, D2_cert };
enum class Verdict { holds, fails, inconclusive };

const char* to_string(CertKind k);
const char* to_string(Verdict v);

struct Evidence {
  double lambda = 0.0;
  double value = 0.0;
};

struct GrowthCertificate {
  CertKind kind = CertKind::G;
  int k = 0;
  double omega = 0.0;
  double M = 0.0;
  std::vector<Evidence> evidence;
  Verdict verdict = Verdict::inconclusive;
  /// Fitted log-log slope where applicable.
  double slope = 0.0;
  double fit_residual = 0.0;
  /// Measured constant from the cross-check of D1/D2 certificates.
  std::optional<double> measured_M;
  std::vector<std::string> notes;
};

std::string certificate_to_json(const GrowthCertificate& c);

GrowthCertificate estimate_G_index(const MatrixPencil& p, const LambdaGrid& grid, Side side);
GrowthCertificate estimate_R_index(const MatrixPencil& p, const LambdaGrid& grid);
GrowthCertificate check_Dk(const MatrixPencil& p, int k, const LambdaGrid& grid, Side side);
GrowthCertificate check_left_dissipativity(const MatrixPencil& p, double omega);
GrowthCertificate certify_D1(const MatrixPencil& p, double omega);
GrowthCertificate certify_D2(const MatrixPencil& p, double omega);

/// Tries omega in {0} and {+-2^j : j = -4..4} in increasing order; returns the
/// first certificate that holds, or the certificate at omega = 2^4 otherwise.
GrowthCertificate search_omega(const MatrixPencil& p, CertKind kind);

struct TractabilityStage {
  CMatrix E, A, Q, P;
};

struct TractabilityChain {
  std::vector<TractabilityStage> stages;  // last stage has injective E and Q = 0
  std::optional<int> index;
};

TractabilityChain tractability_chain(const MatrixPencil& p, int max_stages = -1);

struct IndexReport {
  GrowthCertificate g_left;
  GrowthCertificate g_right;
  GrowthCertificate r_index;
  std::optional<int> tractability;
  std::optional<int> wong;
  int qz = 0;
  double d_omega = 0.0;
  GrowthCertificate d_check;
  std::vector<std::string> violations;
};

IndexReport index_comparison_report(const MatrixPencil& p, const LambdaGrid& grid = LambdaGrid::defaults());

std::string index_report_to_json(const IndexReport& r);

}  // namespace adae
