#include "gkdv/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace gkdv {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_run_csv(const RunRecord& record, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_run_csv: cannot open " + path);
  out << "t,c,rho,mass,energy,z_h1,virial,lyapunov,c1_proxy,rho1_proxy\n";
  for (std::size_t i = 0; i < record.t.size(); ++i) {
    out << fmt(record.t[i]) << ',' << fmt(record.c[i]) << ',' << fmt(record.rho[i])
        << ',' << fmt(record.mass[i]) << ',' << fmt(record.energy[i]) << ','
        << fmt(record.z_h1[i]) << ',' << fmt(record.virial[i]) << ','
        << fmt(record.lyapunov[i]) << ',' << fmt(record.c1_proxy[i]) << ','
        << fmt(record.rho1_proxy[i]) << '\n';
  }
}

void write_summary_json(const std::vector<RunRecord>& records, const std::string& path) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& record : records) {
    nlohmann::json entry;
    for (const auto& [key, value] : record.config) entry["config"][key] = value;
    entry["summary"] = {{"c_T", record.summary.c_T},
                        {"rho_T", record.summary.rho_T},
                        {"z_h1_T", record.summary.z_h1_T},
                        {"u_h1_T", record.summary.u_h1_T},
                        {"wall_time", record.summary.wall_time}};
    entry["seam_warning"] = record.seam_warning;
    entry["claims"] = nlohmann::json::array();
    for (const auto& claim : record.claims) {
      nlohmann::json c = {{"claim_tag", claim.tag},
                          {"measured", claim.measured},
                          {"bound", claim.bound},
                          {"pass", claim.pass}};
      if (!claim.note.empty()) c["note"] = claim.note;
      entry["claims"].push_back(c);
    }
    doc.push_back(entry);
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_summary_json: cannot open " + path);
  out << doc.dump(2) << '\n';
}

void write_checkpoint(const std::string& path, const GridFunction& u, double t,
                      const ControlSpec& spec) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_checkpoint: cannot open " + path);
  out << "# gkdv checkpoint v1\n";
  out << "# L=" << fmt(u.length) << " N=" << u.size() << " p=" << spec.p
      << " eps=" << fmt(spec.eps) << " cf=" << fmt(spec.c_f)
      << " delta0=" << fmt(spec.delta0) << " gamma0=" << fmt(spec.gamma0)
      << " t=" << fmt(t) << " x0=" << fmt(u.x0) << '\n';
  out << "x,u\n";
  for (std::size_t i = 0; i < u.size(); ++i)
    out << fmt(u.x(i)) << ',' << fmt(u[i]) << '\n';
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_checkpoint: cannot open " + path);
  std::string line;
  std::getline(in, line);  // banner
  std::getline(in, line);  // header
  Checkpoint cp;
  double length = 0.0, x0 = 0.0;
  std::size_t n = 0;
  {
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) {
      auto eq = tok.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = tok.substr(0, eq);
      const double val = std::stod(tok.substr(eq + 1));
      if (key == "#") continue;
      if (key == "L") length = val;
      else if (key == "N") n = static_cast<std::size_t>(val);
      else if (key == "p") cp.p = static_cast<int>(val);
      else if (key == "eps") cp.eps = val;
      else if (key == "cf") cp.c_f = val;
      else if (key == "delta0") cp.delta0 = val;
      else if (key == "gamma0") cp.gamma0 = val;
      else if (key == "t") cp.t = val;
      else if (key == "x0") x0 = val;
    }
  }
  if (n == 0) throw std::runtime_error("read_checkpoint: malformed header");
  cp.u = GridFunction(x0, length, n);
  std::getline(in, line);  // column names
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line))
      throw std::runtime_error("read_checkpoint: truncated sample block");
    auto comma = line.find(',');
    cp.u[i] = std::stod(line.substr(comma + 1));
  }
  return cp;
}

void dump_ansatz_csv(const Ansatz& ansatz, const std::string& path, double dy) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("dump_ansatz_csv: cannot open " + path);
  const double eps = ansatz.spec().eps;
  const double y_lo = -3.5 / eps;
  const double y_hi = 60.0 / std::sqrt(ansatz.state().c);
  out << "y,u_tilde,residual\n";
  for (double y = y_lo; y <= y_hi; y += dy)
    out << fmt(y) << ',' << fmt(ansatz.value(y)) << ',' << fmt(ansatz.residual_point(y))
        << '\n';
}

std::vector<std::pair<std::string, std::string>> read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_key_values: cannot open " + path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    out.emplace_back(strip(line.substr(0, eq)), strip(line.substr(eq + 1)));
  }
  return out;
}

void write_key_values(const std::string& path,
                      const std::vector<std::pair<std::string, std::string>>& kv) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_key_values: cannot open " + path);
  for (const auto& [key, value] : kv) out << key << " = " << value << '\n';
}

}  // namespace gkdv
