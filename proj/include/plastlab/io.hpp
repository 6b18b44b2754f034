// SPDX-License-Identifier: MIT
//
// Serialization helpers: deterministic JSON documents (insertion-ordered
// keys, round-trip-exact numbers) and locale-independent CSV tables.

#ifndef PLASTLAB_IO_HPP
#define PLASTLAB_IO_HPP

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "forward.hpp"
#include "model.hpp"
#include "util.hpp"

namespace plastlab {

using ojson = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

// Plain-text table with '.' decimal separator and 17 significant digits;
// cells never contain commas, so no quoting is needed.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::vector<std::string>& add_row() {
    rows.emplace_back();
    return rows.back();
  }

  std::string to_string() const {
    std::string out;
    auto append_line = [&out](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) out += ',';
        out += cells[i];
      }
      out += '\n';
    };
    append_line(header);
    for (const auto& row : rows) {
      if (row.size() != header.size())
        throw std::logic_error("CsvTable: row width differs from header");
      append_line(row);
    }
    return out;
  }
};

inline std::string csv_cell(double v) { return format_double(v); }
inline std::string csv_cell(int v) { return std::to_string(v); }

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

inline void write_file(const std::filesystem::path& path,
                       const std::string& content) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

// ---------------------------------------------------------------------------
// JSON views of core objects
// ---------------------------------------------------------------------------

inline ojson to_json(const Eigen::VectorXd& v) {
  ojson arr = ojson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

inline ojson model_summary_json(const DiscreteModel& m) {
  ojson j;
  j["name"] = m.name;
  j["mu"] = m.law.mu;
  j["lam"] = m.law.lam;
  j["k1"] = m.law.k1;
  j["yield_radius"] = m.law.yield_radius;
  j["points"] = m.points();
  j["ndofs"] = m.ndofs();
  j["ncontrols"] = m.ncontrols();
  return j;
}

// Full nodal record of a run: loads and controls, displacements, both stress
// blocks (packed symmetric components per point), and the cellwise multiplier.
inline ojson trajectory_json(const DiscreteModel& m, const Trajectory& tr,
                             const LoadProgram* controls = nullptr) {
  ojson j;
  j["model"] = model_summary_json(m);
  j["horizon"] = tr.horizon();
  j["steps"] = tr.steps();
  j["times"] = ojson::array();
  for (double t : tr.t) j["times"].push_back(t);
  if (controls != nullptr) {
    j["control"] = ojson::array();
    for (const auto& g : controls->g) j["control"].push_back(to_json(g));
  }
  j["load"] = ojson::array();
  for (const auto& l : tr.load) j["load"].push_back(to_json(l));
  j["displacement"] = ojson::array();
  for (const auto& u : tr.u) j["displacement"].push_back(to_json(u));
  j["stress"] = ojson::array();
  j["back_stress"] = ojson::array();
  for (const auto& s : tr.Sigma) {
    Eigen::VectorXd sig(m.points() * m.ncomp()), chi(m.points() * m.ncomp());
    for (int p = 0; p < m.points(); ++p) {
      sig.segment(p * m.ncomp(), m.ncomp()) = s[p].sigma.packed();
      chi.segment(p * m.ncomp(), m.ncomp()) = s[p].chi.packed();
    }
    j["stress"].push_back(to_json(sig));
    j["back_stress"].push_back(to_json(chi));
  }
  j["multiplier"] = ojson::array();
  for (const auto& lam : tr.lambda) j["multiplier"].push_back(to_json(lam));
  return j;
}

inline ojson forward_report_json(const ForwardReport& rep) {
  ojson j;
  j["total_iterations"] = rep.total_iterations;
  j["fallback_steps"] = rep.fallback_steps;
  j["drift_fixes"] = rep.drift_fixes;
  j["max_equilibrium_residual"] = rep.max_equilibrium_residual;
  j["max_yield_excess"] = rep.max_yield_excess;
  j["max_kinematic_residual"] = rep.max_kinematic_residual;
  j["energy_gap"] = rep.energy_gap;
  j["sigma_h1"] = rep.sigma_h1;
  j["u_h1"] = rep.u_h1;
  j["load_h1"] = rep.load_h1;
  j["stability_constant"] = rep.stability_constant;
  return j;
}

}  // namespace plastlab

#endif  // PLASTLAB_IO_HPP
