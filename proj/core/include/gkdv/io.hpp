#pragma once

#include <string>
#include <vector>

#include "gkdv/ansatz.hpp"
#include "gkdv/control.hpp"
#include "gkdv/grid.hpp"

namespace gkdv {

/// One checked claim of an experiment: a machine-readable tag, the measured
/// value, the bound it is held against, and the verdict.
struct ClaimCheck {
  std::string tag;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
  std::string note;
};

struct RunSummary {
  double c_T = 0.0;
  double rho_T = 0.0;
  double z_h1_T = 0.0;
  double u_h1_T = 0.0;
  double wall_time = 0.0;
  double err_h1_target = 0.0;  // ||u(T) - q_{c_f}(. - rho(T))||_H1
  double rho_dot_T = 0.0;      // differenced rho'(T) over the last stride
};

/// Time series plus summary of one controlled (or free) evolution.
struct RunRecord {
  std::vector<std::pair<std::string, std::string>> config;  // echoed key=value
  std::vector<double> t, c, rho, mass, energy, z_h1, virial, lyapunov, c1_proxy,
      rho1_proxy;
  std::vector<double> u_h1;  // not a CSV column; used by the stabilization fit
  RunSummary summary;
  bool seam_warning = false;
  std::vector<ClaimCheck> claims;
};

/// Fixed-column CSV: t,c,rho,mass,energy,z_h1,virial,lyapunov,c1_proxy,rho1_proxy.
void write_run_csv(const RunRecord& record, const std::string& path);

/// Summary JSON with the config echo, summary block and claim list.
void write_summary_json(const std::vector<RunRecord>& records, const std::string& path);

/// Plain-text checkpoint: commented header carrying (L, N, p, eps, c_f,
/// delta0, gamma0, t, x0), then one "x,u" row per grid point.
void write_checkpoint(const std::string& path, const GridFunction& u, double t,
                      const ControlSpec& spec);
struct Checkpoint {
  GridFunction u;
  double t = 0.0;
  int p = 2;
  double eps = 0.0, c_f = 0.0, delta0 = 0.0, gamma0 = 0.0;
};
Checkpoint read_checkpoint(const std::string& path);

/// (y, u~, S[u~]) profile dump of an ansatz on a uniform window.
void dump_ansatz_csv(const Ansatz& ansatz, const std::string& path, double dy = 0.05);

/// Flat key=value configuration file (lines starting with '#' are comments).
std::vector<std::pair<std::string, std::string>> read_key_values(const std::string& path);
void write_key_values(const std::string& path,
                      const std::vector<std::pair<std::string, std::string>>& kv);

}  // namespace gkdv
