// realmono: command-line front end for the realmono library.
//
//   realmono classify --poset FILE
//   realmono check --system FILE [--out DIR]
//   realmono synchronize --system FILE [--root NAME] [--child-order P:C1,C2]... [--out DIR]
//   realmono synchronizable --poset FILE
//   realmono cftp --kernel FILE [--seed N] [--samples M]
//
// Exit codes: 0 success / true verdict, 1 false verdict, 2 input error,
// 3 resource cap exceeded.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "realmono/realmono.hpp"

namespace fs = std::filesystem;
using namespace realmono;

namespace {

struct JobConfig {
  std::string command;
  std::string poset;
  std::string system;
  std::string kernel;
  std::string root;
  std::vector<std::string> child_orders;
  std::string out;
  std::uint64_t seed = 0;
  std::size_t samples = 1;
  std::size_t cap_upsets = kDefaultUpSetCap;
  std::size_t cap_tuples = kDefaultTupleCap;
  std::size_t cap_trees = kDefaultTreeCap;
  std::uint64_t cap_epochs = std::uint64_t{1} << 30;
};

enum Exit { kOk = 0, kFalse = 1, kInput = 2, kCap = 3 };

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write '" + path.string() + "'");
  out << text;
}

fs::path output_dir(const JobConfig& cfg) {
  fs::path dir(cfg.out);
  fs::create_directories(dir);
  return dir;
}

std::string set_text(const Poset& s, const UpSet& u) {
  std::string out = "{";
  for (std::size_t i = 0; i < u.size(); ++i) out += (i ? "," : "") + s.name(u[i]);
  return out + "}";
}

std::string interval_text(const Rational& lo, const Rational& hi) {
  return "[" + format_rational(lo) + "," + format_rational(hi) + ")";
}

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

int cmd_classify(const JobConfig& cfg) {
  auto p = io::load_poset(cfg.poset);
  std::cout << "elements " << p.size() << "\n";
  std::vector<std::pair<std::string, std::string>> edges;
  for (const auto& e : cover_graph(p).edges) edges.push_back({p.name(e.lower), p.name(e.upper)});
  std::sort(edges.begin(), edges.end());
  for (const auto& [lo, hi] : edges) std::cout << "edge " << lo << " " << hi << "\n";
  std::cout << "class " << to_string(classify(p)) << "\n";
  return kOk;
}

int cmd_check(const JobConfig& cfg) {
  auto loaded = io::load_system(cfg.system);
  const auto& sys = loaded.system;
  std::cout << "indices " << sys.index.size() << "\nstates " << sys.state.size() << "\n";
  auto mono = is_stoch_monotone(sys, cfg.cap_upsets);
  if (!mono) {
    const auto& v = *mono.violation;
    std::cout << "verdict not-stochastically-monotone\n";
    std::cout << "witness " << sys.index.name(v.alpha) << " " << sys.index.name(v.beta) << " "
              << set_text(sys.state, v.upset) << "\n";
    return kFalse;
  }
  auto r = realize(sys, cfg.cap_tuples);
  std::cout << "tuples " << r.tuple_count << "\n";
  if (!r.feasible) {
    std::cout << "verdict monotone-not-realizable\n";
    for (Element a = 0; a < sys.index.size(); ++a)
      for (Element s = 0; s < sys.state.size(); ++s)
        std::cout << "certificate " << sys.index.name(a) << " " << sys.state.name(s) << " "
                  << format_rational(r.certificate[a][s]) << "\n";
    return kFalse;
  }
  std::cout << "verdict realizable\n";
  auto text = io::serialize_coupling(r.coupling, sys);
  std::cout << text;
  if (!cfg.out.empty()) write_file(output_dir(cfg) / "coupling.txt", text);
  return kOk;
}

ChildOrderings parse_child_orders(const Poset& s, const std::vector<std::string>& specs) {
  ChildOrderings out;
  for (const auto& spec : specs) {
    auto colon = spec.find(':');
    if (colon == std::string::npos) throw InvalidInput("--child-order expects PARENT:CHILD,CHILD,...");
    Element parent = s.index(spec.substr(0, colon));
    std::vector<Element> children;
    std::stringstream rest(spec.substr(colon + 1));
    for (std::string c; std::getline(rest, c, ',');) children.push_back(s.index(c));
    out[parent] = std::move(children);
  }
  return out;
}

int cmd_synchronize(const JobConfig& cfg) {
  auto loaded = io::load_system(cfg.system);
  const auto& sys = loaded.system;
  const auto& s = sys.state;
  auto graph = cover_graph(s);
  if (!graph.is_tree()) throw NotATree("state cover graph is not a tree; no inverse transform exists");
  Element root = cfg.root.empty() ? graph.leaves().front() : s.index(cfg.root);
  auto rooting = root_tree(s, root, parse_child_orders(s, cfg.child_orders));
  const auto& ext = rooting.extension;

  std::cout << "class " << to_string(classify(s)) << "\n";
  std::cout << "root " << s.name(root) << "\n";
  std::cout << "extension";
  for (Element e : ext.order) std::cout << " " << s.name(e);
  std::cout << "\n";

  auto mono = is_stoch_monotone(sys, cfg.cap_upsets);
  if (!mono) {
    const auto& v = *mono.violation;
    std::cout << "verdict false\nreason not-stochastically-monotone " << sys.index.name(v.alpha) << " "
              << sys.index.name(v.beta) << " " << set_text(s, v.upset) << "\n";
    return kFalse;
  }

  std::vector<StepFunction> naive;
  for (const auto& m : sys.measures) naive.push_back(inverse_transform(m, ext));
  for (Element a = 0; a < sys.index.size(); ++a)
    for (Element b = 0; b < sys.index.size(); ++b) {
      if (a == b || !sys.index.leq(a, b)) continue;
      for (const auto& [lo, hi] : pointwise_violations(naive[a], naive[b], s))
        std::cout << "naive-violation " << sys.index.name(a) << " " << sys.index.name(b) << " "
                  << interval_text(lo, hi) << "\n";
    }

  auto sync = synchronize_system(sys, ext, cfg.cap_tuples);
  if (!sync.feasible) {
    std::cout << "method coupling\nverdict false\nreason monotone-not-realizable\n";
    return kFalse;
  }
  std::cout << "method " << (sync.identity ? "identity" : "coupling") << "\n";
  std::cout << "cells " << sync.phis.front().cells << "\n";
  auto verdict = verify_synchronized(sync.phis, sys, {ext});
  for (Element a = 0; a < sys.index.size(); ++a) {
    std::cout << "phi " << sys.index.name(a);
    for (auto c : sync.phis[a].perm) std::cout << " " << c;
    std::cout << "\n";
  }
  if (!cfg.out.empty()) {
    auto dir = output_dir(cfg);
    for (Element a = 0; a < sys.index.size(); ++a)
      write_file(dir / ("phi_" + sys.index.name(a) + ".txt"), io::serialize_cell_permutation(sync.phis[a]));
    std::vector<std::string> labels;
    for (Element a = 0; a < sys.index.size(); ++a) labels.push_back(sys.index.name(a) + " : " + loaded.labels[a]);
    const std::size_t cells = sync.phis.front().cells;
    write_file(dir / "naive.svg", svg::step_functions(naive, labels, s, ext, cells));
    write_file(dir / "composed.svg",
               svg::step_functions(composed_transforms(sync.phis, sys, {ext}), labels, s, ext, cells));
    write_file(dir / "phi.svg", svg::cell_maps(sync.phis, labels));
  }
  std::cout << "verdict " << (verdict ? "true" : "false") << "\n";
  if (!verdict) std::cout << "reason " << verdict.reason << "\n";
  return verdict ? kOk : kFalse;
}

int cmd_synchronizable(const JobConfig& cfg) {
  auto a = io::load_poset(cfg.poset);
  auto report = synchronizability(a, cfg.cap_trees);
  auto show = [&](const char* side, const std::optional<SpanningTreeWitness>& w) {
    if (!w) {
      std::cout << side << " none\n";
      return;
    }
    std::cout << side << " tree";
    for (auto [u, v] : w->edges) std::cout << " " << a.name(u) << "-" << a.name(v);
    std::cout << "\n";
  };
  show("minimal", report.minimal_side);
  if (report.minimal_side) show("maximal", report.maximal_side);
  std::cout << "synchronizable " << (report.synchronizable() ? "true" : "false") << "\n";
  return report.synchronizable() ? kOk : kFalse;
}

int cmd_cftp(const JobConfig& cfg) {
  auto kernel = io::load_kernel(cfg.kernel);
  auto pi = stationary_exact(kernel);
  auto gc = build_grand_coupling(kernel, cfg.cap_tuples);
  CftpSampler sampler(gc, CftpOptions{cfg.cap_epochs, true});
  std::vector<std::size_t> counts(kernel.states.size(), 0);
  std::string out;
  for (std::size_t i = 0; i < cfg.samples; ++i) {
    auto r = sampler.sample(run_seed(cfg.seed, i));
    ++counts[r.state];
    out += kernel.states.name(r.state);
    out += '\n';
  }
  std::cout << out;
  const char* source = gc.source == GrandCoupling::Source::Identity       ? "identity"
                       : gc.source == GrandCoupling::Source::Synchronized ? "synchronized"
                                                                          : "direct";
  std::cout << "# samples " << cfg.samples << "\n# seed " << cfg.seed << "\n# coupling " << source << "\n# cells "
            << gc.cells << "\n";
  for (Element s = 0; s < kernel.states.size(); ++s)
    std::cout << "# state " << kernel.states.name(s) << " count " << counts[s] << " stationary "
              << format_rational(pi[s]) << "\n";
  auto chi = chi_square_test(counts, pi);
  std::cout << "# chi2 " << fixed(chi.statistic) << " dof " << chi.dof << " p " << fixed(chi.p_value) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monotone realizations of stochastically monotone systems on finite posets"};
  app.require_subcommand(1);
  JobConfig cfg;

  auto add_caps = [&](CLI::App* sub) {
    sub->add_option("--cap-upsets", cfg.cap_upsets, "Maximum number of up-sets enumerated")->check(CLI::PositiveNumber);
    sub->add_option("--cap-tuples", cfg.cap_tuples, "Maximum number of monotone tuples")->check(CLI::PositiveNumber);
    sub->add_option("--cap-trees", cfg.cap_trees, "Maximum spanning-tree candidates")->check(CLI::PositiveNumber);
    sub->add_option("--cap-epochs", cfg.cap_epochs, "Maximum CFTP look-back")->check(CLI::PositiveNumber);
  };

  auto* classify_cmd = app.add_subcommand("classify", "Report cover graph and class of a poset");
  classify_cmd->add_option("--poset", cfg.poset, "Poset file")->required()->check(CLI::ExistingFile);

  auto* check_cmd = app.add_subcommand("check", "Decide stochastic and realizable monotonicity of a system");
  check_cmd->add_option("--system", cfg.system, "System file")->required()->check(CLI::ExistingFile);
  check_cmd->add_option("--out", cfg.out, "Directory for coupling.txt");
  add_caps(check_cmd);

  auto* sync_cmd = app.add_subcommand("synchronize", "Build and verify synchronizing cell maps");
  sync_cmd->add_option("--system", cfg.system, "System file")->required()->check(CLI::ExistingFile);
  sync_cmd->add_option("--root", cfg.root, "Leaf of the state cover graph used as root");
  sync_cmd->add_option("--child-order", cfg.child_orders, "Children order, PARENT:C1,C2,...");
  sync_cmd->add_option("--out", cfg.out, "Directory for cell maps and SVG plots");
  add_caps(sync_cmd);

  auto* syncable_cmd = app.add_subcommand("synchronizable", "Decide synchronizability of an index poset");
  syncable_cmd->add_option("--poset", cfg.poset, "Poset file")->required()->check(CLI::ExistingFile);
  add_caps(syncable_cmd);

  auto* cftp_cmd = app.add_subcommand("cftp", "Perfect sampling by monotone coupling from the past");
  cftp_cmd->add_option("--kernel", cfg.kernel, "Kernel file")->required()->check(CLI::ExistingFile);
  cftp_cmd->add_option("--seed", cfg.seed, "Seed of the randomness stream");
  cftp_cmd->add_option("--samples", cfg.samples, "Number of independent samples")->check(CLI::PositiveNumber);
  add_caps(cftp_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  try {
    if (*classify_cmd) return cmd_classify(cfg);
    if (*check_cmd) return cmd_check(cfg);
    if (*sync_cmd) return cmd_synchronize(cfg);
    if (*syncable_cmd) return cmd_synchronizable(cfg);
    if (*cftp_cmd) return cmd_cftp(cfg);
  } catch (const Infeasible& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFalse;
  } catch (const SizeLimit& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCap;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const NotStochMonotone& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  }
  return kInput;
}
