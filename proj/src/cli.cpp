/*
 * Copyright 2026 The meshgrain Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "meshgrain/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <bit>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "meshgrain/bounds.hpp"
#include "meshgrain/matrix_io.hpp"
#include "meshgrain/maze.hpp"
#include "meshgrain/meshmul.hpp"
#include "meshgrain/paths.hpp"
#include "meshgrain/programs.hpp"
#include "meshgrain/scaling.hpp"
#include "meshgrain/stacked.hpp"
#include "meshgrain/systolic.hpp"

namespace meshgrain {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot write '" + path + "'");
  f << text;
}

// Ledger file: a few identifying keys, then the ledger itself.
void write_ledger(const std::string& path, const std::string& head, const StepLedger& ledger) {
  if (path.empty()) return;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot write '" + path + "'");
  f << head << ledger.to_key_value();
}

double parse_real(const std::string& text) { return Rational::parse(text).value(); }

struct MatmulArgs {
  std::string algo, semiring = "plusmul", a_path, b_path, out, ledger, alpha = "9/4";
  int n = 0;
  std::uint64_t seed = 1;
  std::optional<int> forced_s;
  int word_budget = 32;
};

int do_matmul(const MatmulArgs& o, std::ostream& out) {
  const auto sr = Semiring::parse(o.semiring);
  Matrix a, b;
  if (!o.a_path.empty() || !o.b_path.empty()) {
    if (o.a_path.empty() || o.b_path.empty()) throw std::invalid_argument("matmul: give both -A and -B");
    a = read_matrix_file(o.a_path, sr);
    b = read_matrix_file(o.b_path, sr);
  } else {
    if (o.n < 1) throw std::invalid_argument("matmul: give -A/-B files or --n for random inputs");
    a = random_matrix(o.n, sr, o.seed);
    b = random_matrix(o.n, sr, o.seed + 1);
  }
  if (a.n() != b.n()) throw std::invalid_argument("matmul: A and B differ in size");
  const int n = a.n();

  Matrix c;
  StepLedger ledger;
  std::ostringstream head;
  head << "command=matmul\nalgo=" << o.algo << "\nsemiring=" << sr.name() << "\nn=" << n << '\n';
  if (o.algo == "systolic2d") {
    auto r = systolic_matmul_2d(a, b, {.word_budget = o.word_budget, .trace = {}});
    c = std::move(r.c);
    ledger = std::move(r.ledger);
    head << "processors=" << static_cast<std::uint64_t>(n) * n << '\n';
  } else if (o.algo == "sim2d-on-3d") {
    auto r = simulate_2d_on_3d(systolic_program(a, b), {.dim = 2, .edge = n, .word_budget = o.word_budget});
    c = systolic_product(r.final_state, n, sr);
    ledger = std::move(r.ledger);
    head << "processors=" << static_cast<std::uint64_t>(r.layout.s) * r.layout.s * r.layout.s << '\n'
         << "steps_2d=" << r.steps_2d << '\n';
  } else if (o.algo == "alg-a") {
    const double alpha = parse_real(o.alpha);
    auto r = general_matmul_3d(a, b, alpha, {.word_budget = o.word_budget});
    c = std::move(r.c);
    ledger = std::move(r.ledger);
    head << "alpha=" << o.alpha << "\nmesh_edge=" << r.plan.edge << "\nlevels=" << r.plan.levels << '\n';
  } else {
    const auto sched = plan_alg_b(std::bit_ceil(static_cast<std::uint64_t>(n)), 7, 2, o.forced_s);
    auto r = ring_matmul_3d(a, b, sched, o.word_budget);
    c = std::move(r.c);
    ledger = std::move(r.ledger);
    head << "mesh_edge=" << sched.mesh_edge << "\nsteps=" << sched.steps
         << "\nlevels_per_step=" << sched.levels_per_step << "\ntop_level_subproblems="
         << r.top_level_subproblems << '\n';
  }
  write_text(o.out, emit_matrix(c), out);
  write_ledger(o.ledger, head.str(), ledger);
  return kExitOk;
}

struct PathsArgs {
  std::string problem, mode = "ring", alpha = "9/4", in, out, ledger;
  int n = 0;
  double density = 0.3;
  std::uint64_t seed = 1;
  std::vector<int> path;
};

int do_paths(const PathsArgs& o, std::ostream& out) {
  const Semiring sr = o.problem == "closure" ? Semiring::boolor()
                      : o.problem == "apsp"  ? Semiring::minplus()
                                             : Semiring::maxmin();
  Matrix g;
  if (!o.in.empty()) {
    g = read_matrix_file(o.in, sr);
  } else {
    if (o.n < 1) throw std::invalid_argument("paths: give --in or --n for a random graph");
    g = random_graph(o.n, sr, o.density, o.seed);
  }
  if (!o.path.empty() && o.problem != "apsp")
    throw std::invalid_argument("paths: --path needs --problem apsp");
  PathsOptions opt;
  opt.alpha = parse_real(o.alpha);

  std::ostringstream head;
  head << "command=paths\nproblem=" << o.problem << "\nn=" << g.n() << '\n';
  if (o.problem == "closure") {
    auto r = transitive_closure(g, o.mode == "boolean" ? ClosureMode::Boolean : ClosureMode::Ring, opt);
    head << "mode=" << o.mode << "\nsquarings=" << r.squarings << '\n';
    write_text(o.out, emit_matrix(r.closure), out);
    write_ledger(o.ledger, head.str(), r.ledger);
  } else if (o.problem == "bottleneck") {
    auto r = bottleneck_apsp(g, opt);
    head << "squarings=" << r.squarings << '\n';
    write_text(o.out, emit_matrix(r.widths), out);
    write_ledger(o.ledger, head.str(), r.ledger);
  } else {
    auto r = apsp(g, opt);
    head << "squarings=" << r.squarings << '\n';
    write_text(o.out, emit_matrix(r.dist), out);
    write_ledger(o.ledger, head.str(), r.ledger);
    if (!o.path.empty()) {
      const int i = o.path[0], j = o.path[1];
      if (i < 0 || j < 0 || i >= g.n() || j >= g.n()) throw std::invalid_argument("paths: vertex out of range");
      const auto p = reconstruct_path(r.witnesses, i, j);
      out << "distance=" << r.dist.at(i, j) << "\npath=";
      for (std::size_t k = 0; k < p.size(); ++k) out << (k ? " " : "") << p[k];
      out << '\n';
    }
  }
  return kExitOk;
}

Maze pad_maze(const Maze& maze) {
  const int n = static_cast<int>(std::bit_ceil(static_cast<unsigned>(maze.n())));
  if (n == maze.n()) return maze;
  maze.validate();
  Maze out(maze.dim(), n);
  for (std::size_t i = 0; i < maze.cells(); ++i)
    if (maze.white(i)) out.set_white(maze.coord(i), true);
  out.set_start(maze.start());
  out.set_finish(maze.finish());
  return out;
}

struct MazeArgs {
  int dim = 0;
  std::string in, out, algo = "recursive", ledger;
  std::optional<std::string> c, alpha;
  bool mark = false, require_path = false;
  int n = 0;
  double density = 0.6;
  std::uint64_t seed = 1;
};

int do_maze(const MazeArgs& o, std::ostream& out, std::ostream& err) {
  Maze maze;
  if (!o.in.empty()) {
    maze = Maze::parse(read_file(o.in));
    if (o.dim && maze.dim() != o.dim)
      throw std::invalid_argument("maze: file holds a " + std::to_string(maze.dim()) + "-d maze");
  } else {
    if (o.n < 2 || !o.dim) throw std::invalid_argument("maze: give --in or --dim with --n for a random maze");
    maze = random_maze(o.dim, o.n, o.density, o.seed);
  }
  PathResult r;
  if (o.algo == "wave") {
    r = wave_bfs(maze);
  } else {
    // the recursive solvers want a power-of-2 edge; black padding changes nothing
    const Maze padded = pad_maze(maze);
    r = padded.dim() == 2 ? solve_maze_2d(padded, o.alpha ? parse_real(*o.alpha) : 2.25)
                          : solve_maze_3d(padded, o.c ? parse_real(*o.c) : 4.5);
  }

  std::ostringstream summary;
  summary << "reachable=" << (r.reachable ? 1 : 0) << '\n'
          << "distance=" << (r.distance ? std::to_string(*r.distance) : "none") << '\n'
          << "charged_time=" << r.charged_time << '\n'
          << "mesh_size=" << r.mesh_size_used << '\n';
  out << summary.str();
  if (o.mark) write_text(o.out, maze.to_text(r.path), out);
  if (!o.ledger.empty()) {
    std::ofstream f(o.ledger, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot write '" + o.ledger + "'");
    f << "command=maze\nalgo=" << o.algo << "\ndim=" << maze.dim() << "\nn=" << maze.n() << '\n'
      << summary.str();
    for (std::size_t l = 0; l < r.level_charges.size(); ++l) f << "level." << l << '=' << r.level_charges[l] << '\n';
  }
  if (o.require_path && !r.reachable) {
    err << "meshgrain: no path from start to finish\n";
    return kExitNoPath;
  }
  return kExitOk;
}

struct BoundsArgs {
  std::uint64_t n = 0;
  int dim = 3;
  std::optional<std::string> alpha;
  std::optional<std::uint64_t> size;
};

int do_bounds(const BoundsArgs& o, std::ostream& out) {
  std::optional<Rational> alpha;
  if (o.alpha) alpha = Rational::parse(*o.alpha);
  out << bounds(o.n, o.dim, o.size, alpha).to_key_value();
  return kExitOk;
}

struct ScalingArgs {
  std::string algo, alpha = "9/4", out, in;
  std::vector<int> sizes;
  int seeds = 1;
  std::uint64_t seed = 1;
  bool fit = false;
};

void print_fit(std::ostream& os, const ExponentFit& f) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "slope=%.3f\nintercept=%.3f\n", f.slope, f.intercept);
  os << buf;
}

int do_scaling(const ScalingArgs& o, std::ostream& out, std::ostream& err) {
  if (!o.in.empty()) {
    print_fit(out, fit_exponent(parse_scaling_csv(read_file(o.in))));
    return kExitOk;
  }
  if (o.algo.empty() || o.sizes.empty()) throw std::invalid_argument("scaling: give --algo and --sizes");
  auto rows = run_scaling(o.algo, o.sizes, parse_real(o.alpha), o.seeds, o.seed, err);
  std::vector<int> distinct(o.sizes);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::size_t done = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) done += i == 0 || rows[i].n != rows[i - 1].n;
  write_text(o.out, emit_scaling_csv(rows), out);
  if (done < std::min<std::size_t>(2, distinct.size())) {
    err << "meshgrain: too few sizes succeeded\n";
    return kExitInput;
  }
  if (o.fit && done >= 2) {
    std::ostringstream f;
    print_fit(f, fit_exponent(rows));
    err << f.str();
  }
  return kExitOk;
}

struct ProgramArgs {
  std::string name, ledger;
  int dim = 2, edge = 4, word_budget = 32, rounds = 3;
  std::size_t target = 0;
};

int do_program(const ProgramArgs& o, std::ostream& out) {
  MeshState mesh({.dim = o.dim, .edge = o.edge, .word_budget = o.word_budget});
  if (o.target >= mesh.size()) throw std::invalid_argument("program: target outside the mesh");
  ProgramSpec spec = o.name == "broadcast"   ? programs::broadcast(7)
                     : o.name == "diffusion" ? programs::diffusion(o.rounds)
                     : o.name == "hoard"     ? programs::hoard(o.target)
                                             : programs::double_send(o.target);
  spec.load(mesh);
  auto ledger = run_program(mesh, spec.program, spec.halt, spec.name);
  std::ostringstream head;
  head << "command=program\nname=" << spec.name << "\ndim=" << o.dim << "\nedge=" << o.edge << '\n';
  out << head.str() << ledger.to_key_value();
  write_ledger(o.ledger, head.str(), ledger);
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"meshgrain: simulator of 2-d and 3-d mesh-connected computers"};
  app.name("meshgrain");
  app.require_subcommand(1);

  MatmulArgs mm;
  auto* matmul = app.add_subcommand("matmul", "Multiply two matrices on a mesh");
  matmul->add_option("--algo", mm.algo, "Algorithm")
      ->required()
      ->check(CLI::IsMember({"systolic2d", "sim2d-on-3d", "alg-a", "alg-b"}));
  matmul->add_option("--semiring", mm.semiring, "plusmul, minplus, maxmin or boolor")
      ->check(CLI::IsMember({"plusmul", "minplus", "maxmin", "boolor"}));
  matmul->add_option("-A", mm.a_path, "Matrix file A");
  matmul->add_option("-B", mm.b_path, "Matrix file B");
  matmul->add_option("--n", mm.n, "Size of random inputs (instead of -A/-B)");
  matmul->add_option("--seed", mm.seed, "Seed for random inputs");
  matmul->add_option("--alpha", mm.alpha, "Mesh size exponent for alg-a, e.g. 9/4");
  matmul->add_option("--forced-s", mm.forced_s, "Number of grid steps for alg-b");
  matmul->add_option("--word-budget", mm.word_budget, "Words per processor");
  matmul->add_option("-o,--out", mm.out, "Output matrix file (default stdout)");
  matmul->add_option("--ledger", mm.ledger, "Write the step ledger (key=value) here");

  PathsArgs pa;
  auto* paths = app.add_subcommand("paths", "Closure, shortest and widest paths by squaring");
  paths->add_option("--problem", pa.problem, "closure, apsp or bottleneck")
      ->required()
      ->check(CLI::IsMember({"closure", "apsp", "bottleneck"}));
  paths->add_option("--mode", pa.mode, "Closure multiplier: ring or boolean")
      ->check(CLI::IsMember({"ring", "boolean"}));
  paths->add_option("--alpha", pa.alpha, "Mesh size exponent of the general multiplier");
  paths->add_option("--in", pa.in, "Graph matrix file");
  paths->add_option("--n", pa.n, "Random graph size (instead of --in)");
  paths->add_option("--density", pa.density, "Arc probability of the random graph");
  paths->add_option("--seed", pa.seed, "Random graph seed");
  paths->add_option("-o,--out", pa.out, "Output matrix file (default stdout)");
  paths->add_option("--path", pa.path, "Print a shortest path i j (apsp)")->expected(2);
  paths->add_option("--ledger", pa.ledger, "Write the step ledger here");

  MazeArgs ma;
  auto* maze = app.add_subcommand("maze", "Shortest path through a maze");
  maze->add_option("--dim", ma.dim, "2 or 3")->check(CLI::IsMember({2, 3}));
  maze->add_option("--in", ma.in, "Maze text file");
  maze->add_option("--n", ma.n, "Random maze edge (instead of --in)");
  maze->add_option("--density", ma.density, "White density of the random maze");
  maze->add_option("--seed", ma.seed, "Random maze seed");
  maze->add_option("--algo", ma.algo, "recursive or wave")->check(CLI::IsMember({"recursive", "wave"}));
  maze->add_option("--c", ma.c, "3-d mesh size exponent, 4 to 9/2");
  maze->add_option("--alpha", ma.alpha, "2-d mesh size exponent, 2 to 9/4");
  maze->add_flag("--mark", ma.mark, "Write the maze with the path marked '*'");
  maze->add_option("-o,--out", ma.out, "Marked maze file (default stdout)");
  maze->add_flag("--require-path", ma.require_path, "Exit 3 when start and finish are not connected");
  maze->add_option("--ledger", ma.ledger, "Write the charges here");

  BoundsArgs ba;
  auto* bnd = app.add_subcommand("bounds", "Lower bounds for matrix multiplication on a mesh");
  bnd->add_option("--n", ba.n, "Matrix size")->required();
  bnd->add_option("--dim", ba.dim, "Mesh dimension")->check(CLI::IsMember({2, 3}));
  auto* alpha_opt = bnd->add_option("--alpha", ba.alpha, "Mesh size n^alpha");
  bnd->add_option("--size", ba.size, "Mesh size in processors")->excludes(alpha_opt);

  ScalingArgs sa;
  auto* scaling = app.add_subcommand("scaling", "Step counts across sizes as CSV");
  scaling->add_option("--algo", sa.algo, "Algorithm")->check(CLI::IsMember(scaling_algorithms()));
  scaling->add_option("--sizes", sa.sizes, "Comma-separated sizes")->delimiter(',');
  scaling->add_option("--alpha", sa.alpha, "Mesh size exponent");
  scaling->add_option("--seeds", sa.seeds, "Seeds per size");
  scaling->add_option("--seed", sa.seed, "First seed");
  scaling->add_option("-o,--out", sa.out, "CSV file (default stdout)");
  scaling->add_flag("--fit", sa.fit, "Report the fitted exponent on stderr");
  scaling->add_option("--in", sa.in, "Fit the exponent of an existing CSV");

  ProgramArgs pr;
  auto* program = app.add_subcommand("program", "Run a demonstration program on the engine");
  program->add_option("--name", pr.name, "broadcast, diffusion, hoard or double-send")
      ->required()
      ->check(CLI::IsMember({"broadcast", "diffusion", "hoard", "double-send"}));
  program->add_option("--dim", pr.dim, "2 or 3")->check(CLI::IsMember({2, 3}));
  program->add_option("--edge", pr.edge, "Mesh edge");
  program->add_option("--word-budget", pr.word_budget, "Words per processor");
  program->add_option("--rounds", pr.rounds, "Diffusion rounds");
  program->add_option("--target", pr.target, "Processor index for hoard and double-send");
  program->add_option("--ledger", pr.ledger, "Write the step ledger here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return kExitInput;
  }

  try {
    if (*matmul) return do_matmul(mm, out);
    if (*paths) return do_paths(pa, out);
    if (*maze) return do_maze(ma, out, err);
    if (*bnd) return do_bounds(ba, out);
    if (*scaling) return do_scaling(sa, out, err);
    if (*program) return do_program(pr, out);
  } catch (const ConstraintViolation& e) {
    err << "meshgrain: " << e.what() << '\n';
    return kExitConstraint;
  } catch (const SizeError& e) {
    err << "meshgrain: SizeError: " << e.what() << '\n';
    return kExitConstraint;
  } catch (const PathError& e) {
    err << "meshgrain: " << e.what() << '\n';
    return kExitNoPath;
  } catch (const std::exception& e) {
    err << "meshgrain: error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace meshgrain
