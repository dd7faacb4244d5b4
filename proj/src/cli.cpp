#include "rtree/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "rtree/amalgamation.hpp"
#include "rtree/error.hpp"
#include "rtree/evaluate.hpp"
#include "rtree/generators.hpp"
#include "rtree/independence.hpp"
#include "rtree/io.hpp"
#include "rtree/realization.hpp"
#include "rtree/types.hpp"

namespace rtree::cli {

namespace {

// Bad flag values; reported like CLI11 usage errors.
class UsageError : public Error {
 public:
  using Error::Error;
};

// A false verdict or failed check whose witness lines are already written.
struct Verdict {
  int code;
};

Rat rat_flag(const std::string& flag, const std::string& text) {
  if (auto r = Rat::try_parse(text)) return *r;
  throw UsageError(flag + ": malformed rational '" + text + "' (expected <int> or <int>/<int>)");
}

Rat default_mesh() {
  if (const char* env = std::getenv("RTREE_MESH")) return rat_flag("RTREE_MESH", env);
  return Rat(1, 16);
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// <name> | <node id> | <label> | edge:<u>:<v>:<offset>
PointRef point(const LoadedTree& lt, const std::string& text) {
  const Tree& t = lt.tree;
  if (text.rfind("edge:", 0) == 0) {
    std::vector<std::string> parts;
    std::size_t start = 5;
    for (std::size_t i = 5; i <= text.size(); ++i)
      if (i == text.size() || text[i] == ':') {
        parts.push_back(text.substr(start, i - start));
        start = i + 1;
      }
    if (parts.size() != 3) throw UsageError("point '" + text + "': expected edge:<u>:<v>:<offset>");
    return t.edge_point(t.node(parts[0]), t.node(parts[1]), rat_flag(text, parts[2]));
  }
  if (auto it = lt.points.find(text); it != lt.points.end()) return it->second;
  if (auto n = t.find(text)) return PointRef::vertex(*n);
  for (NodeIndex n = 0; n < t.node_count(); ++n)
    for (const auto& l : t.labels(n))
      if (l == text) return PointRef::vertex(n);
  throw TreeError("unknown point '" + text + "'");
}

std::vector<PointRef> points(const LoadedTree& lt, const std::string& list) {
  std::vector<PointRef> out;
  for (const auto& s : split(list)) out.push_back(point(lt, s));
  return out;
}

std::string where(const Tree& t, const PointRef& x) { return t.describe(x); }

void witness(std::ostream& err, const FourPointWitness& w, const std::vector<std::string>& labels) {
  err << "error=four-point\n"
      << "x=" << labels[w.x] << "\ny=" << labels[w.y] << "\nz=" << labels[w.z] << "\nt=" << labels[w.t] << "\n"
      << "lhs=" << w.lhs << "\nrhs=" << w.rhs << "\n";
}

struct Flags {
  std::string tree, matrix, left, right, shared, formula, formula_file, basepoint, kind;
  std::string radius, mesh, s, t, lengths, ctx, q1, q2, q, context, a, b, bset, c, pts, degrees;
  std::vector<std::string> at;
  std::uint64_t seed = 0;
  unsigned depth = 0, mu = 3, k = 3;
  std::size_t count = 1, max_nodes = 2'000'000;
};

int cmd_check(const Flags& f, std::ostream& out, std::ostream& err) {
  const TreeDocument doc = parse_tree_text(read_file(f.tree));
  const Rat r = f.radius.empty() ? doc.radius : rat_flag("--radius", f.radius);
  bool structural = false;
  for (const auto& v : validate(doc.raw, r).violations) {
    if (v.kind == Violation::Kind::RadiusExceeded) continue;
    structural = true;
    err << "violation=" << to_string(v.kind) << "\ndetail=" << v.detail << "\n";
    for (const auto& w : v.witness) err << "witness=" << w << "\n";
    if (v.value) err << "value=" << *v.value << "\n";
  }
  if (structural) return 1;
  const LoadedTree lt = load_tree(doc);
  const AxiomReport rep = check_rt_axioms(lt.tree, r, f.mesh.empty() ? default_mesh() : rat_flag("--mesh", f.mesh));
  out << rep.str() << "\n";
  if (rep.ok()) return 0;
  if (!rep.bound_ok()) {
    NodeIndex far = lt.tree.basepoint();
    for (NodeIndex n = 0; n < lt.tree.node_count(); ++n)
      if (lt.tree.depth(n) > lt.tree.depth(far)) far = n;
    err << "axiom=1\nvalue=" << rep.bound.upper << "\nradius=" << r << "\nwitness=" << lt.tree.id(far) << "\n";
  }
  if (!rep.midpoint.upper.is_zero()) err << "axiom=2\nvalue=" << rep.midpoint.str() << "\n";
  if (!rep.hyperbolic.upper.is_zero()) err << "axiom=3\nvalue=" << rep.hyperbolic.str() << "\n";
  return 1;
}

int cmd_eval(const Flags& f, std::ostream& out) {
  const LoadedTree lt = read_tree_file(f.tree);
  if (f.formula.empty() == f.formula_file.empty()) throw UsageError("eval: give exactly one of --formula, --formula-file");
  const Formula phi = parse_formula(f.formula.empty() ? read_file(f.formula_file) : f.formula);
  Valuation v;
  for (const auto& binding : f.at) {
    const auto eq = binding.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--at: expected <var>=<point>, got '" + binding + "'");
    v.insert_or_assign(binding.substr(0, eq), point(lt, binding.substr(eq + 1)));
  }
  const Rat mesh = f.mesh.empty() ? default_mesh() : rat_flag("--mesh", f.mesh);
  if (mesh.sign() <= 0) throw UsageError("--mesh: must be positive");
  Valuation named = lt.points;
  for (NodeIndex n = 0; n < lt.tree.node_count(); ++n)
    for (const auto& l : lt.tree.labels(n)) named.emplace(l, PointRef::vertex(n));
  if (phi.quantifier_free())
    out << eval_qf(lt.tree, phi, v, named) << "\n";
  else
    out << eval_quantified(lt.tree, phi, v, mesh, named).str() << "\n";
  return 0;
}

int cmd_realize(const Flags& f, std::ostream& out, std::ostream& err) {
  const MetricMatrix m = parse_matrix_text(read_file(f.matrix));
  if (auto w = four_point_check(m)) {
    witness(err, *w, m.labels);
    return 1;
  }
  const std::string base = f.basepoint.empty() ? m.labels.front() : f.basepoint;
  const RealizedTree rt = realize(m, base);
  out << write_tree(rt.tree, f.radius.empty() ? rt.tree.max_depth() : rat_flag("--radius", f.radius));
  return 0;
}

int cmd_matrix(const Flags& f, std::ostream& out) {
  const LoadedTree lt = read_tree_file(f.tree);
  std::vector<PointRef> pts;
  std::vector<std::string> labels;
  if (!f.pts.empty()) {
    labels = split(f.pts);
    pts = points(lt, f.pts);
  } else if (!lt.points.empty()) {
    for (const auto& [name, x] : lt.points) {
      labels.push_back(name);
      pts.push_back(x);
    }
  } else {
    for (NodeIndex n = 0; n < lt.tree.node_count(); ++n) {
      labels.push_back(lt.tree.id(n));
      pts.push_back(PointRef::vertex(n));
    }
  }
  out << write_matrix(tree_to_matrix(lt.tree, pts, labels));
  return 0;
}

int cmd_amalgamate(const Flags& f, std::ostream& out) {
  const LoadedTree l = read_tree_file(f.left), r = read_tree_file(f.right);
  SharedPoints shared;
  for (const auto& [a, b] : parse_pairs_text(read_file(f.shared))) shared.emplace_back(point(l, a), point(r, b));
  const Rat radius = rat_flag("--radius", f.radius);
  const Amalgam am = amalgamate(l.tree, r.tree, shared, radius);
  std::map<std::string, PointRef> named;
  for (const auto& [name, x] : l.points) named.insert_or_assign("left:" + name, am.left(x));
  for (const auto& [name, x] : r.points) named.insert_or_assign("right:" + name, am.right(x));
  out << write_tree(am.tree, radius, named);
  return 0;
}

// The one-type over the empty context (the basepoint alone) with offset s.
TypeDescriptor empty_context_type(const Rat& s, const Rat& r) {
  if (s.is_zero()) {
    const Tree t = Tree::point();
    return type_of(t, std::vector<PointRef>{}, std::vector<PointRef>{t.basepoint_ref()}, r);
  }
  const Tree t = primitives::segment(s, r);
  return type_of(t, std::vector<PointRef>{}, std::vector<PointRef>{PointRef::vertex(t.node("q"))}, r);
}

int verdict(std::ostream& out, bool yes) {
  out << (yes ? "true" : "false") << "\n";
  return yes ? 0 : 1;
}

int cmd_type(const std::string& sub, const Flags& f, std::ostream& out, std::ostream& err) {
  if (sub == "of") {
    const LoadedTree lt = read_tree_file(f.tree);
    const Rat r = f.radius.empty() ? lt.radius : rat_flag("--radius", f.radius);
    const TypeDescriptor q = type_of(lt.tree, points(lt, f.a), points(lt, f.b), r);
    std::ofstream ctx(f.context);
    if (!ctx) throw Error("cannot write '" + f.context + "'");
    ctx << write_tree(q.context.realized(), r);
    out << write_descriptor(q, f.context);
    return 0;
  }
  if (sub == "eq") return verdict(out, types_equal(read_descriptor_file(f.q1), read_descriptor_file(f.q2)));
  if (sub == "dist") {
    if (!f.ctx.empty()) {
      if (f.ctx != "empty") throw UsageError("--ctx: only 'empty' is supported; use --q1/--q2 for other contexts");
      if (f.s.empty() || f.t.empty()) throw UsageError("--ctx empty needs --s <rat> and --t <rat>");
      const Rat s = rat_flag("--s", f.s), t = rat_flag("--t", f.t);
      if (s.sign() < 0 || t.sign() < 0) throw UsageError("--s, --t: must be non-negative");
      const Rat r = f.radius.empty() ? rtree::max(s, t) : rat_flag("--radius", f.radius);
      out << one_type_distance(empty_context_type(s, r), empty_context_type(t, r)) << "\n";
      return 0;
    }
    const TypeDescriptor q1 = read_descriptor_file(f.q1), q2 = read_descriptor_file(f.q2);
    if (q1.arity() == 1 && q2.arity() == 1) {
      out << one_type_distance(q1, q2) << "\n";
    } else {
      const Rat mesh = f.mesh.empty() ? default_mesh() : rat_flag("--mesh", f.mesh);
      out << type_distance_search(q1, q2, mesh).str() << "\n";
    }
    return 0;
  }
  if (sub == "realize") {
    const TypeDescriptor q = read_descriptor_file(f.q);
    if (const DescriptorCheck c = validate_descriptor(q); !c) {
      err << "error=inconsistent-descriptor\nkind=" << to_string(c.kind) << "\ndetail=" << c.detail << "\n";
      return 1;
    }
    const Realization real = realize_type(q.context.realized(), q);
    std::map<std::string, PointRef> named;
    for (std::size_t i = 0; i < real.points.size(); ++i) named.emplace("x" + std::to_string(i + 1), real.points[i]);
    out << write_tree(real.tree, q.radius, named);
    return 0;
  }
  return verdict(out, is_principal(read_descriptor_file(f.q)));
}

int cmd_indep(const Flags& f, std::ostream& out, std::ostream& err) {
  const LoadedTree lt = read_tree_file(f.tree);
  const auto res = is_star_independent(lt.tree, points(lt, f.a), points(lt, f.bset), points(lt, f.c));
  if (res) {
    out << "independent\n";
    return 0;
  }
  const auto& w = *res.witness;
  out << "forking\n";
  err << "index=" << w.index + 1 << "\npoint=" << where(lt.tree, w.point) << "\nwith_b=" << where(lt.tree, w.with_b.point)
      << "\ndist_with_b=" << w.with_b.distance << "\nwithout_b=" << where(lt.tree, w.without_b.point)
      << "\ndist_without_b=" << w.without_b.distance << "\n";
  return 1;
}

int cmd_generate(const std::string& sub, const Flags& f, std::ostream& out) {
  const Rat r = f.radius.empty() ? Rat(1) : rat_flag("--radius", f.radius);
  if (sub == "rb") {
    const Tree base = f.tree.empty() ? Tree::point() : read_tree_file(f.tree).tree;
    out << write_tree(rb_extend(base, r, f.depth, f.max_nodes), r);
  } else if (sub == "degrees") {
    GeneratorConfig cfg;
    cfg.seed = f.seed;
    cfg.depth = f.depth;
    cfg.radius = r;
    if (!f.mesh.empty()) cfg.mesh = rat_flag("--mesh", f.mesh);
    cfg.degree_set.clear();
    for (const auto& d : split(f.degrees)) {
      const auto k = Rat::try_parse(d);
      if (!k || !k->is_integer()) throw UsageError("--degrees: expected a comma-separated list of integers");
      cfg.degree_set.insert(std::stoi(d));
    }
    out << write_tree(degree_family_tree(cfg, f.max_nodes), r);
  } else if (sub == "universal") {
    const UniversalSample s = au_sample_ball(f.mu, f.count, r, f.seed);
    for (std::size_t i = 0; i < s.functions.size(); ++i) out << "# f" << i << " = " << s.functions[i].str() << "\n";
    out << write_tree(s.tree, r);
  } else {
    std::vector<Rat> len;
    for (const auto& l : split(f.lengths)) len.push_back(rat_flag("--lengths", l));
    auto need = [&](std::size_t n, const char* grammar) {
      if (len.size() != n) throw UsageError(std::string("--lengths: ") + grammar);
    };
    Tree t = Tree::point();
    if (f.kind == "segment") {
      need(1, "segment takes <len>");
      t = primitives::segment(len[0], r);
    } else if (f.kind == "tripod") {
      need(3, "tripod takes <to_p>,<to_a>,<to_b>");
      t = primitives::tripod(len[0], len[1], len[2], r);
    } else if (f.kind == "kstar") {
      need(1, "kstar takes <len> (and --k <legs>)");
      t = primitives::k_star(f.k, len[0], r);
    } else if (f.kind == "caterpillar") {
      need(2, "caterpillar takes <spine>,<leg> (and --k <spine vertices>)");
      t = primitives::caterpillar(f.k, len[0], len[1], r);
    } else {
      throw UsageError("--kind: expected segment|tripod|kstar|caterpillar");
    }
    out << write_tree(t, r);
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite pointed R-trees of bounded radius", "rtree"};
  app.require_subcommand(1);
  Flags f;
  auto tree_flag = [&](CLI::App* c, bool required = true) {
    auto* o = c->add_option("--tree", f.tree, "tree file")->check(CLI::ExistingFile);
    if (required) o->required();
  };
  auto mesh_flag = [&](CLI::App* c) { c->add_option("--mesh", f.mesh, "grid mesh <rat> (default $RTREE_MESH or 1/16)"); };

  auto* check = app.add_subcommand("check", "validate a tree and report the axioms");
  tree_flag(check);
  check->add_option("--radius", f.radius, "radius <rat> (default: the file's radius)");
  mesh_flag(check);

  auto* eval = app.add_subcommand("eval", "evaluate a formula on a tree");
  tree_flag(eval);
  eval->add_option("--formula", f.formula, "formula text");
  eval->add_option("--formula-file", f.formula_file, "formula file")->check(CLI::ExistingFile);
  eval->add_option("--at", f.at, "<var>=<point>, repeatable");
  mesh_flag(eval);

  auto* realize_cmd = app.add_subcommand("realize", "realize a distance matrix as a tree");
  realize_cmd->add_option("--matrix", f.matrix, "matrix file")->required()->check(CLI::ExistingFile);
  realize_cmd->add_option("--basepoint", f.basepoint, "basepoint label (default: the first label)");
  realize_cmd->add_option("--radius", f.radius, "radius written to the output (default: its depth)");

  auto* matrix = app.add_subcommand("matrix", "distance matrix of points of a tree");
  tree_flag(matrix);
  matrix->add_option("--points", f.pts, "comma-separated points (default: named points, else all vertices)");

  auto* amal = app.add_subcommand("amalgamate", "amalgamate two trees over a shared subtree");
  amal->add_option("--left", f.left, "tree file")->required()->check(CLI::ExistingFile);
  amal->add_option("--right", f.right, "tree file")->required()->check(CLI::ExistingFile);
  amal->add_option("--shared", f.shared, "file of `pair <left> <right>` lines")->required()->check(CLI::ExistingFile);
  amal->add_option("--radius", f.radius, "radius <rat>")->required();

  auto* type = app.add_subcommand("type", "type descriptors");
  type->require_subcommand(1);
  auto* of = type->add_subcommand("of", "descriptor of --b over --A");
  tree_flag(of);
  of->add_option("--A", f.a, "comma-separated parameter points");
  of->add_option("--b", f.b, "comma-separated tuple")->required();
  of->add_option("--radius", f.radius, "radius <rat>");
  of->add_option("--context-out", f.context, "where to write the context tree")->required();
  auto* eq = type->add_subcommand("eq", "are two descriptors equal");
  auto* dist = type->add_subcommand("dist", "distance between two types");
  for (auto* c : {eq, dist}) {
    c->add_option("--q1", f.q1, "descriptor file")->check(CLI::ExistingFile);
    c->add_option("--q2", f.q2, "descriptor file")->check(CLI::ExistingFile);
  }
  eq->get_option("--q1")->required();
  eq->get_option("--q2")->required();
  dist->add_option("--ctx", f.ctx, "'empty': one-types over the basepoint, with --s and --t");
  dist->add_option("--s", f.s, "offset <rat>");
  dist->add_option("--t", f.t, "offset <rat>");
  dist->add_option("--radius", f.radius, "radius <rat> (default max(s,t))");
  mesh_flag(dist);
  auto* treal = type->add_subcommand("realize", "realize a descriptor over its context");
  auto* principal = type->add_subcommand("principal", "is the type principal");
  for (auto* c : {treal, principal}) c->add_option("--q", f.q, "descriptor file")->required()->check(CLI::ExistingFile);

  auto* indep = app.add_subcommand("indep", "star independence of A and B over C");
  tree_flag(indep);
  indep->add_option("--A", f.a, "comma-separated points")->required();
  indep->add_option("--B", f.bset, "comma-separated points");
  indep->add_option("--C", f.c, "comma-separated points");

  auto* gen = app.add_subcommand("generate", "generate trees");
  gen->require_subcommand(1);
  for (const char* name : {"rb", "degrees", "universal", "primitive"}) {
    auto* g = gen->add_subcommand(name);
    g->add_option("--seed", f.seed, "seed");
    g->add_option("--depth", f.depth, "depth");
    g->add_option("--radius", f.radius, "radius <rat> (default 1)");
    g->add_option("--max-nodes", f.max_nodes, "node budget");
  }
  gen->get_subcommand("rb")->description("richly branching extension of --tree (default {p})");
  tree_flag(gen->get_subcommand("rb"), false);
  auto* deg = gen->get_subcommand("degrees");
  deg->description("tree with branch degrees in --degrees");
  deg->add_option("--degrees", f.degrees, "comma-separated degrees ≥ 3")->required();
  mesh_flag(deg);
  auto* uni = gen->get_subcommand("universal");
  uni->description("sampled ball of the step-function tree");
  uni->add_option("--mu", f.mu, "branching number ≥ 3");
  uni->add_option("--count", f.count, "number of sampled functions, basepoint included");
  auto* prim = gen->get_subcommand("primitive");
  prim->description("segment, tripod, k-star or caterpillar");
  prim->add_option("--kind", f.kind, "segment|tripod|kstar|caterpillar")->required();
  prim->add_option("--lengths", f.lengths, "comma-separated lengths")->required();
  prim->add_option("--k", f.k, "legs (kstar) or spine vertices (caterpillar)");

  CLI::App* active = &app;
  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
    for (CLI::App* c = &app; c; c = c->get_subcommands().empty() ? nullptr : c->get_subcommands().front()) active = c;
    const std::string cmd = app.get_subcommands().front()->get_name();
    const std::string sub = active->get_name();
    if (cmd == "check") return cmd_check(f, out, err);
    if (cmd == "eval") return cmd_eval(f, out);
    if (cmd == "realize") return cmd_realize(f, out, err);
    if (cmd == "matrix") return cmd_matrix(f, out);
    if (cmd == "amalgamate") return cmd_amalgamate(f, out);
    if (cmd == "type") return cmd_type(sub, f, out, err);
    if (cmd == "indep") return cmd_indep(f, out, err);
    return cmd_generate(sub, f, out);
  } catch (const CLI::CallForHelp&) {
    for (CLI::App* c = &app; c; c = c->get_subcommands().empty() ? nullptr : c->get_subcommands().front()) active = c;
    out << active->help();
    return 0;
  } catch (const CLI::ParseError& e) {
    for (CLI::App* c = &app; c; c = c->get_subcommands().empty() ? nullptr : c->get_subcommands().front()) active = c;
    err << "error=usage\nmessage=" << e.what() << "\n" << active->help();
    return 2;
  } catch (const UsageError& e) {
    err << "error=usage\nmessage=" << e.what() << "\n" << active->help();
    return 2;
  } catch (const ParseError& e) {
    err << "error=parse\nmessage=" << e.what() << "\n";
    if (e.line() > 0) err << "line=" << e.line() << "\ncolumn=" << e.column() << "\n";
    return 2;
  } catch (const FourPointViolation& e) {
    err << "error=four-point\nmessage=" << e.what() << "\n";
    return 1;
  } catch (const RadiusExceeded& e) {
    err << "error=radius-exceeded\nwitness=" << e.witness() << "\ndistance=" << e.distance() << "\n";
    return 1;
  } catch (const NotIsometric& e) {
    err << "error=not-isometric\nfirst=" << e.first() << "\nsecond=" << e.second() << "\nmessage=" << e.what() << "\n";
    return 1;
  } catch (const InconsistentDescriptor& e) {
    err << "error=inconsistent-descriptor\nmessage=" << e.what() << "\n";
    return 1;
  } catch (const ContextMismatch& e) {
    err << "error=context-mismatch\nmessage=" << e.what() << "\n";
    return 1;
  } catch (const GenerationLimit& e) {
    err << "error=generation-limit\nmessage=" << e.what() << "\n";
    return 1;
  } catch (const TreeError& e) {
    err << "error=tree\nmessage=" << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error=failed\nmessage=" << e.what() << "\n";
    return 1;
  }
}

}  // namespace rtree::cli
