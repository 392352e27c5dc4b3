#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pgs/grasp_io.hpp"
#include "pgs/queries.hpp"

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

struct CommonArgs {
  std::string grasp_path;
  double eta_deg = 0.0;
  double gamma_deg = 90.0;
  int q_max = 9;
  double s_cap = 100.0;
  bool trace = false;
  std::string output;
  std::vector<double> preload;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("grasp", args.grasp_path, "grasp description file")
      ->required();
  cmd->add_option("--eta-deg", args.eta_deg,
                  "contact normal uncertainty bound, degrees");
  cmd->add_option("--gamma-deg", args.gamma_deg,
                  "initial friction sector angle, degrees");
  cmd->add_option("--q-max", args.q_max, "maximum refinement depth");
  cmd->add_option("--s-cap", args.s_cap, "disturbance scale ceiling");
  cmd->add_flag("--trace", args.trace, "write per-round trace to stderr");
  cmd->add_option("-o,--output", args.output, "write the result to a file");
  cmd->add_option("--preload", args.preload,
                  "override commanded torques (one value per joint)")
      ->expected(-1);
}

pgs::QueryOptions make_options(const CommonArgs& args) {
  pgs::QueryOptions opt;
  opt.gamma = args.gamma_deg * kDegToRad;
  opt.q_max = args.q_max;
  opt.eta = args.eta_deg * kDegToRad;
  opt.s_cap = args.s_cap;
  if (args.trace) opt.trace = &std::cerr;
  return opt;
}

pgs::VecX preload_of(const CommonArgs& args, const pgs::GraspModel& grasp) {
  if (args.preload.empty()) return grasp.commanded_torques;
  if (static_cast<int>(args.preload.size()) != grasp.num_joints) {
    throw std::invalid_argument("--preload needs one value per joint");
  }
  pgs::VecX tau(grasp.num_joints);
  for (int j = 0; j < grasp.num_joints; ++j) tau[j] = args.preload[j];
  return tau;
}

pgs::Vec6 vec6_of(const std::vector<double>& v, const char* what) {
  if (v.size() != 6) {
    throw std::invalid_argument(std::string(what) + " needs 6 components");
  }
  pgs::Vec6 w;
  for (int a = 0; a < 6; ++a) w[a] = v[a];
  return w;
}

void emit(const CommonArgs& args, const std::string& text) {
  if (args.output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(args.output);
    if (!out) throw std::runtime_error("cannot write " + args.output);
    out << text;
  }
}

std::string provenance(const pgs::RefinementOutcome& detail) {
  std::string s;
  char line[160];
  for (const auto& r : detail.rounds) {
    double max_delta = 0.0;
    for (double d : r.delta) max_delta = std::max(max_delta, d);
    std::snprintf(line, sizeof line,
                  "round %d: objective=%.9g max_delta_deg=%.6g edges=%d "
                  "nodes=%ld\n",
                  r.round, r.objective, max_delta / kDegToRad, r.total_edges,
                  r.nodes);
    s += line;
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"passive grasp stability analysis"};
  app.require_subcommand(1);

  CommonArgs check_args, max_args, opt_args, map_args, ablate_args;
  std::vector<double> wrench_in, direction_in;
  bool no_mdp = false;
  std::string plane = "xy";
  double resolution_deg = 1.0;
  int jobs = 1;

  CLI::App* check = app.add_subcommand(
      "check", "spot-check stability under a fixed disturbance");
  add_common(check, check_args);
  check->add_option("--wrench", wrench_in, "disturbance wrench (6 values)")
      ->expected(-1);
  check->add_flag("--no-mdp", no_mdp,
                  "drop the energy-consistency friction coupling");

  CLI::App* maxw = app.add_subcommand(
      "max-wrench", "largest resistible disturbance along a direction");
  add_common(maxw, max_args);
  maxw->add_option("--direction", direction_in,
                   "disturbance direction (6 values)")
      ->expected(-1)
      ->required();

  CLI::App* optt = app.add_subcommand(
      "optimal-torques", "commands minimizing the largest actuator torque");
  add_common(optt, opt_args);
  optt->add_option("--wrench", wrench_in, "disturbance wrench (6 values)")
      ->expected(-1);

  CLI::App* fmap = app.add_subcommand(
      "force-map", "maximum resistible force over a plane of directions");
  add_common(fmap, map_args);
  fmap->add_option("--plane", plane, "direction plane: xy, xz or yz");
  fmap->add_option("--resolution-deg", resolution_deg, "angular step");
  fmap->add_option("--jobs", jobs, "parallel workers");

  CLI::App* ablate = app.add_subcommand(
      "ablate", "stability check without the dissipation constraints");
  add_common(ablate, ablate_args);
  ablate->add_option("--wrench", wrench_in, "disturbance wrench (6 values)")
      ->expected(-1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (check->parsed()) {
      const auto grasp = pgs::load_grasp_file(check_args.grasp_path);
      const auto tau = preload_of(check_args, grasp);
      const pgs::Vec6 w = wrench_in.empty()
                              ? grasp.wrench
                              : vec6_of(wrench_in, "--wrench");
      const auto opt = make_options(check_args);
      if (no_mdp) {
        const auto res = pgs::ablation_no_mdp(grasp, tau, w, opt);
        std::string text;
        if (res.verdict == pgs::Verdict::kStable) {
          text = "STABLE (single relaxed solve)\n" +
                 pgs::describe_witness(grasp, res.witness);
        } else if (res.verdict == pgs::Verdict::kUnstable) {
          text = "UNSTABLE (single relaxed solve)\n";
        } else {
          emit(check_args, "INCONCLUSIVE (solver limits)\n");
          return 3;
        }
        emit(check_args, text);
        return 0;
      }
      const auto res = pgs::check_stability(grasp, tau, w, opt);
      char head[96];
      if (res.verdict == pgs::Verdict::kStable) {
        std::snprintf(head, sizeof head, "STABLE (accepted at round %d)\n",
                      res.detail.rounds.back().round);
        emit(check_args, head + provenance(res.detail) +
                             pgs::describe_witness(grasp, res.detail.solution));
        return 0;
      }
      if (res.verdict == pgs::Verdict::kUnstable) {
        std::snprintf(head, sizeof head, "UNSTABLE (proven at round %d)\n",
                      res.detail.infeasible_round);
        emit(check_args, head + provenance(res.detail));
        return 0;
      }
      emit(check_args, "INCONCLUSIVE (solver limits)\n");
      return 3;
    }

    if (maxw->parsed()) {
      const auto grasp = pgs::load_grasp_file(max_args.grasp_path);
      const auto tau = preload_of(max_args, grasp);
      const pgs::Vec6 dir = vec6_of(direction_in, "--direction");
      const auto res =
          pgs::max_disturbance(grasp, tau, dir, make_options(max_args));
      char head[96];
      switch (res.status) {
        case pgs::MaxDisturbanceStatus::kMaximum:
          std::snprintf(head, sizeof head, "s* = %.6g\n", res.s_star);
          break;
        case pgs::MaxDisturbanceStatus::kExceedsCap:
          std::snprintf(head, sizeof head, "exceeds cap (s_cap=%.6g)\n",
                        max_args.s_cap);
          break;
        case pgs::MaxDisturbanceStatus::kUnstableAtRest:
          std::snprintf(head, sizeof head,
                        "s* = 0 (no equilibrium at rest)\n");
          break;
        default:
          emit(max_args, "INCONCLUSIVE (solver limits)\n");
          return 3;
      }
      emit(max_args, head + provenance(res.detail));
      return 0;
    }

    if (optt->parsed()) {
      const auto grasp = pgs::load_grasp_file(opt_args.grasp_path);
      const pgs::Vec6 w = wrench_in.empty()
                              ? grasp.wrench
                              : vec6_of(wrench_in, "--wrench");
      const auto res =
          pgs::optimal_torques(grasp, w, make_options(opt_args));
      if (res.verdict == pgs::Verdict::kUnstable) {
        emit(opt_args, "INFEASIBLE for all commanded torques\n");
        return 1;
      }
      if (res.verdict == pgs::Verdict::kInconclusive) {
        emit(opt_args, "INCONCLUSIVE (solver limits)\n");
        return 3;
      }
      std::string text = "optimal torques =";
      char buf[48];
      for (int j = 0; j < res.torques.size(); ++j) {
        std::snprintf(buf, sizeof buf, " %.6g", res.torques[j]);
        text += buf;
      }
      std::snprintf(buf, sizeof buf, "\nmax torque = %.6g\n", res.max_torque);
      text += buf;
      emit(opt_args, text + provenance(res.detail) +
                         pgs::describe_witness(grasp, res.detail.solution));
      return 0;
    }

    if (fmap->parsed()) {
      const auto grasp = pgs::load_grasp_file(map_args.grasp_path);
      const auto tau = preload_of(map_args, grasp);
      pgs::Vec6 u = pgs::Vec6::Zero();
      pgs::Vec6 v = pgs::Vec6::Zero();
      if (plane == "xy") {
        u[0] = 1.0;
        v[1] = 1.0;
      } else if (plane == "xz") {
        u[0] = 1.0;
        v[2] = 1.0;
      } else if (plane == "yz") {
        u[1] = 1.0;
        v[2] = 1.0;
      } else {
        throw std::invalid_argument("--plane must be xy, xz or yz");
      }
      const auto map = pgs::force_map(grasp, tau, u, v, resolution_deg,
                                      make_options(map_args), jobs);
      emit(map_args, map.to_csv());
      return 0;
    }

    if (ablate->parsed()) {
      const auto grasp = pgs::load_grasp_file(ablate_args.grasp_path);
      const auto tau = preload_of(ablate_args, grasp);
      const pgs::Vec6 w = wrench_in.empty()
                              ? grasp.wrench
                              : vec6_of(wrench_in, "--wrench");
      const auto res =
          pgs::ablation_no_mdp(grasp, tau, w, make_options(ablate_args));
      if (res.verdict == pgs::Verdict::kInconclusive) {
        emit(ablate_args, "INCONCLUSIVE (solver limits)\n");
        return 3;
      }
      std::string text = res.verdict == pgs::Verdict::kStable ? "STABLE\n"
                                                              : "UNSTABLE\n";
      if (res.has_witness) {
        text += pgs::describe_witness(grasp, res.witness);
        const auto diags = pgs::diagnose(grasp, res.witness);
        for (size_t i = 0; i < diags.size(); ++i) {
          if (diags[i].state == pgs::ContactState::kSliding &&
              diags[i].dissipation < -pgs::kFeasTol) {
            char buf[96];
            std::snprintf(buf, sizeof buf,
                          "energy violation at contact %zu: %.6g\n", i,
                          diags[i].dissipation);
            text += buf;
          }
        }
      }
      emit(ablate_args, text);
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
