// gltdd - assemble the structured model problems, run (preconditioned)
// Krylov solves, and emit eigenvalue/clustering diagnostics as CSV/JSON.

#include <atomic>
#include <functional>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "glt/assembly.hpp"
#include "glt/krylov.hpp"
#include "glt/matrix_market.hpp"
#include "glt/partition.hpp"
#include "glt/schwarz.hpp"
#include "glt/spectra.hpp"
#include "glt/symbol.hpp"

using json = nlohmann::ordered_json;
using namespace glt;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNac = 2;
constexpr int kExitUsage = 64;
constexpr int kExitIo = 74;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::ios_base::failure("cannot open '" + path + "' for writing");
    return f;
}

struct ProblemOptions {
    std::string family = "fd1d";
    int n = 40;
    int p = 2;
    std::string coeff = "one";
    std::string matrix_file;  // solve may load a matrix instead of assembling

    void attach(CLI::App* cmd, bool with_file = false) {
        cmd->add_option("--family", family, "problem family")
            ->check(CLI::IsMember({"toeplitz-abs-theta", "fd1d", "fem1d", "spline1d-c0", "iga2d"}));
        cmd->add_option("--n", n, "mesh parameter");
        cmd->add_option("--p", p, "spline degree");
        cmd->add_option("--coeff", coeff, "coefficient a (one, 1+x^2, 1+x1+x2)");
        if (with_file)
            cmd->add_option("--matrix", matrix_file, "read the system from a Matrix Market file");
    }

    ProblemSpec spec() const {
        ProblemSpec s;
        s.family = family_from_string(family);
        s.n = n;
        s.degree = p;
        s.coefficient = coefficient_by_name(coeff);
        return s;
    }

    json config() const {
        json c;
        if (!matrix_file.empty()) {
            c["matrix"] = matrix_file;
        } else {
            c["family"] = family;
            c["n"] = n;
            if (family == "spline1d-c0" || family == "iga2d") c["p"] = p;
            c["coeff"] = coeff;
        }
        return c;
    }
};

struct PrecondOptions {
    std::string kind = "none";
    int nu = 2;
    int overlap = 0;
    std::string weights;  // empty = kind default

    void attach(CLI::App* cmd) {
        cmd->add_option("--precond", kind, "preconditioner kind")
            ->check(CLI::IsMember({"none", "bj", "bgs", "bas", "bms", "bras", "brms"}));
        cmd->add_option("--nu", nu, "number of subdomains");
        cmd->add_option("--overlap", overlap, "overlap o");
        cmd->add_option("--weights", weights, "prolongation weights override")
            ->check(CLI::IsMember({"full", "restricted", "average"}));
    }

    bool enabled() const { return kind != "none"; }

    json config() const {
        json c;
        c["precond"] = kind;
        if (enabled()) {
            c["nu"] = nu;
            c["overlap"] = overlap;
            if (!weights.empty()) c["weights"] = weights;
        }
        return c;
    }

    /// nullopt when (nu, overlap) is not admissible for this dimension.
    std::optional<SchwarzPreconditioner> build(const StructuredMatrix& A) const {
        SchwarzKind k = schwarz_kind_from_string(kind);
        int o = (k == SchwarzKind::BJ || k == SchwarzKind::BGS) ? 0 : overlap;
        auto part = make_partition(A.dim, nu, o);
        if (!part) return std::nullopt;
        if (!weights.empty()) return setup(A, *part, k, weight_scheme_from_string(weights));
        return setup(A, *part, k);
    }
};

void write_csv_config(std::ostream& os, const json& c) { os << "# config: " << c.dump() << "\n"; }

// ---------------------------------------------------------------------------
// assemble
// ---------------------------------------------------------------------------

int cmd_assemble(const ProblemOptions& prob, const std::string& out) {
    ProblemSpec spec = prob.spec();
    AssemblyResult res = assemble(spec);
    std::string base = out.empty() ? std::string("matrix") : out;
    write_matrix_market(res.matrix, base + ".mtx");
    json side;
    side["config"] = prob.config();
    side["family"] = prob.family;
    side["n"] = prob.n;
    if (spec.family == Family::spline1d_c0 || spec.family == Family::iga2d)
        side["p"] = prob.p;
    side["coefficient"] = prob.coeff;
    side["scale_note"] = res.scale_note;
    side["dim"] = res.matrix.dim;
    if (res.symbol) side["symbol"] = res.symbol->label;
    auto f = open_out(base + ".json");
    f << side.dump(2) << "\n";
    std::cout << "wrote " << base << ".mtx (dim " << res.matrix.dim << ") and " << base
              << ".json\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

int cmd_solve(const ProblemOptions& prob, const PrecondOptions& pre, const std::string& method,
              double tol, int cap, int restart, const std::string& out) {
    StructuredMatrix A;
    if (!prob.matrix_file.empty()) {
        A = read_matrix_market(prob.matrix_file);
    } else {
        A = assemble(prob.spec()).matrix;
    }
    std::optional<SchwarzPreconditioner> P;
    if (pre.enabled()) {
        P = pre.build(A);
        if (!P) {
            std::cout << "nac\n";
            return kExitNac;
        }
    }
    std::vector<double> b(A.dim, 1.0);
    SolveReport rep;
    if (method == "cg")
        rep = cg(A, b, tol, cap, P ? &*P : nullptr);
    else
        rep = gmres(A, b, tol, cap, P ? &*P : nullptr, restart);

    json j;
    json cfg = prob.config();
    json pcfg = pre.config();
    for (auto& [k, v] : pcfg.items()) cfg[k] = v;
    cfg["method"] = method;
    cfg["tol"] = tol;
    cfg["cap"] = rep.cap;
    if (method == "gmres") cfg["restart"] = restart;
    j["config"] = cfg;
    j["method"] = rep.method;
    j["precond"] = rep.preconditioner;
    j["nu"] = pre.enabled() ? pre.nu : 1;
    j["overlap"] = pre.enabled() ? pre.overlap : 0;
    j["n"] = prob.n;
    j["dim"] = rep.dim;
    j["iterations"] = rep.iterations;
    j["converged"] = rep.converged;
    j["final_residual"] = rep.final_true_residual;
    std::string text = j.dump(2) + "\n";
    if (out.empty()) {
        std::cout << text;
    } else {
        auto f = open_out(out);
        f << text;
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// spectrum / cluster
// ---------------------------------------------------------------------------

int cmd_spectrum(const ProblemOptions& prob, const PrecondOptions& pre, const std::string& of,
                 bool against_symbol, int nx, int ntheta, const std::string& out) {
    AssemblyResult res = assemble(prob.spec());
    const StructuredMatrix& A = res.matrix;
    if (A.dim > kDenseEigGuard)
        throw std::invalid_argument("spectrum: dim exceeds the dense guard (5000)");

    std::optional<SchwarzPreconditioner> P;
    if (of != "matrix") {
        if (!pre.enabled()) throw std::invalid_argument("--of " + of + " needs --precond");
        P = pre.build(A);
        if (!P) {
            std::cout << "nac\n";
            return kExitNac;
        }
    }

    std::vector<std::complex<double>> eigs;
    if (of == "matrix") {
        eigs = eigenvalues_dense(A.to_dense());
    } else if (of == "precond") {
        eigs = eigenvalues_dense(P->dense_inverse_image());
        for (auto& z : eigs) z = 1.0 / z;  // spectrum of P from its inverse image
    } else if (of == "precond-applied") {
        eigs = eigenvalues_dense(dense_preconditioned_image(*P));
    } else if (of == "iteration") {
        eigs = eigenvalues_dense(dense_iteration_image(*P));
    } else {
        throw std::invalid_argument("unknown --of '" + of + "'");
    }
    std::sort(eigs.begin(), eigs.end(), [](const auto& a, const auto& b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });

    json cfg = prob.config();
    json pcfg = pre.config();
    for (auto& [k, v] : pcfg.items()) cfg[k] = v;
    cfg["of"] = of;
    std::string path = out.empty() ? std::string("spectrum.csv") : out;
    {
        auto f = open_out(path);
        write_csv_config(f, cfg);
        f << "re,im\n";
        for (const auto& z : eigs) f << fmt(z.real()) << ',' << fmt(z.imag()) << '\n';
    }
    if (against_symbol) {
        if (!res.symbol)
            throw std::invalid_argument("spectrum: this family carries no reference symbol");
        const Symbol& sym = *res.symbol;
        int per_branch = static_cast<int>(eigs.size()) / sym.block_size;
        int use_nx = nx, use_nt = ntheta;
        if (use_nt <= 0) {
            if (sym.depends_on_x) {
                use_nx = use_nx > 0 ? use_nx
                                    : std::max(1, static_cast<int>(std::lround(
                                                      std::sqrt(static_cast<double>(per_branch)))));
                use_nt = std::max(1, per_branch / use_nx);
            } else {
                use_nx = 1;
                use_nt = per_branch;
            }
        } else if (use_nx <= 0) {
            use_nx = 1;
        }
        SymbolSamples samples = symbol_eig_branches(sym, use_nx, use_nt);
        std::string spath = path;
        auto dotpos = spath.rfind(".csv");
        if (dotpos != std::string::npos) spath = spath.substr(0, dotpos);
        spath += ".symbol.csv";
        auto f = open_out(spath);
        write_csv_config(f, cfg);
        write_csv(samples, f);
        std::cout << "wrote " << path << " and " << spath << "\n";
    } else {
        std::cout << "wrote " << path << "\n";
    }
    return kExitOk;
}

int cmd_cluster(const ProblemOptions& prob, const PrecondOptions& pre, std::vector<double> eps,
                const std::string& out) {
    AssemblyResult res = assemble(prob.spec());
    const StructuredMatrix& A = res.matrix;
    if (A.dim > kDenseEigGuard)
        throw std::invalid_argument("cluster: dim exceeds the dense guard (5000)");
    if (!pre.enabled()) throw std::invalid_argument("cluster needs --precond");
    auto P = pre.build(A);
    if (!P) {
        std::cout << "nac\n";
        return kExitNac;
    }
    if (eps.empty()) eps = {0.1, 0.05, 0.025};
    auto eigs = eigenvalues_dense(dense_preconditioned_image(*P));
    ClusterReport rep = cluster_count(eigs, eps);
    json j;
    json cfg = prob.config();
    json pcfg = pre.config();
    for (auto& [k, v] : pcfg.items()) cfg[k] = v;
    cfg["eps"] = eps;
    j["config"] = cfg;
    j["dim"] = A.dim;
    j["eps"] = rep.eps;
    j["counts"] = rep.counts;
    j["fractions"] = rep.fractions;
    std::string text = j.dump(2) + "\n";
    if (out.empty())
        std::cout << text;
    else
        open_out(out) << text;
    return kExitOk;
}

// ---------------------------------------------------------------------------
// table
// ---------------------------------------------------------------------------

struct TableSpec {
    std::string id;
    std::string type;  // "iterations" | "cluster-count" | "cluster-fraction"
    std::string family;
    std::string coeff = "one";
    int p = 2;
    std::string kind;
    int overlap = 0;
    std::vector<int> nus;
    std::vector<int> ns;
    std::vector<double> eps;
    std::vector<std::pair<int, int>> nac_cells;  // printed (nu, n) pairs, paper-frozen
    std::string caption;
};

std::vector<TableSpec> load_registry(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::ios_base::failure("cannot open table registry '" + path + "'");
    json j = json::parse(f);
    std::vector<TableSpec> out;
    for (const auto& t : j.at("tables")) {
        TableSpec s;
        s.id = t.at("id");
        s.type = t.at("type");
        s.family = t.at("family");
        s.coeff = t.value("coeff", "one");
        s.p = t.value("p", 2);
        s.kind = t.value("kind", "");
        s.overlap = t.value("overlap", 0);
        s.nus = t.value("nu", std::vector<int>{});
        s.ns = t.at("n").get<std::vector<int>>();
        s.eps = t.value("eps", std::vector<double>{});
        s.caption = t.value("caption", "");
        if (t.contains("nac"))
            for (const auto& cell : t.at("nac"))
                s.nac_cells.emplace_back(cell.at(0).get<int>(), cell.at(1).get<int>());
        out.push_back(std::move(s));
    }
    return out;
}

struct TableContext {
    const TableSpec& spec;
    std::vector<int> ns;
    std::map<int, AssemblyResult> assemblies;  // keyed by n

    TableContext(const TableSpec& s, int max_n) : spec(s) {
        for (int n : s.ns)
            if (max_n <= 0 || n <= max_n) ns.push_back(n);
        for (int n : ns) {
            ProblemSpec ps;
            ps.family = family_from_string(s.family);
            ps.n = n;
            ps.degree = s.p;
            ps.coefficient = coefficient_by_name(s.coeff);
            assemblies.emplace(n, assemble(ps));
        }
    }
};

void run_cells(int jobs, int count, const std::function<void(int)>& work) {
    if (jobs <= 1) {
        for (int i = 0; i < count; ++i) work(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    int nt = std::min(jobs, count);
    for (int t = 0; t < nt; ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) work(i);
        });
    for (auto& th : pool) th.join();
}

int cmd_table(const std::string& id, const std::string& registry, const std::string& out,
              int jobs, int max_n, bool only_admissibility, double tol, int restart) {
    std::string reg_path = registry;
    if (reg_path.empty()) reg_path = std::string(GLTDD_DATA_DIR) + "/tables.json";
    auto tables = load_registry(reg_path);
    const TableSpec* spec = nullptr;
    for (const auto& t : tables)
        if (t.id == id) spec = &t;
    if (!spec) throw std::invalid_argument("unknown table id '" + id + "'");

    TableContext ctx(*spec, max_n);
    json cfg;
    cfg["table"] = id;
    cfg["family"] = spec->family;
    cfg["coeff"] = spec->coeff;
    if (spec->family == "spline1d-c0" || spec->family == "iga2d") cfg["p"] = spec->p;
    if (!spec->kind.empty()) {
        cfg["kind"] = spec->kind;
        cfg["overlap"] = spec->overlap;
    }
    cfg["tol"] = tol;
    if (!only_admissibility) cfg["restart"] = restart;

    std::ostringstream body;
    if (only_admissibility) {
        body << "nu";
        for (int n : ctx.ns) body << ",n=" << n;
        body << "\n";
        for (int nu : spec->nus) {
            body << nu;
            for (int n : ctx.ns) {
                int dim = ctx.assemblies.at(n).matrix.dim;
                body << ',' << (partition_admissible(dim, nu, spec->overlap) ? "adm" : "nac");
            }
            body << "\n";
        }
    } else if (spec->type == "iterations") {
        SchwarzKind kind = schwarz_kind_from_string(spec->kind);
        struct Cell {
            std::string method;
            int nu, n;
            std::string text;
        };
        std::vector<Cell> cells;
        for (const char* method : {"cg", "pcg", "gmres", "pgmres"})
            for (int nu : spec->nus)
                for (int n : ctx.ns) cells.push_back({method, nu, n, ""});
        // unpreconditioned rows are nu-independent; cache by (method, n)
        std::mutex base_mtx;
        std::map<std::pair<std::string, int>, std::string> base_cache;
        run_cells(jobs, static_cast<int>(cells.size()), [&](int idx) {
            Cell& c = cells[idx];
            const StructuredMatrix& A = ctx.assemblies.at(c.n).matrix;
            std::vector<double> b(A.dim, 1.0);
            bool preconditioned = c.method == "pcg" || c.method == "pgmres";
            if (!preconditioned) {
                {
                    std::lock_guard<std::mutex> lk(base_mtx);
                    auto it = base_cache.find({c.method, c.n});
                    if (it != base_cache.end()) {
                        c.text = it->second;
                        return;
                    }
                }
                SolveReport rep = (c.method == "cg") ? cg(A, b, tol)
                                                     : gmres(A, b, tol, -1, nullptr, restart);
                c.text = std::to_string(rep.iterations);
                std::lock_guard<std::mutex> lk(base_mtx);
                base_cache[{c.method, c.n}] = c.text;
                return;
            }
            auto part = make_partition(A.dim, c.nu, spec->overlap);
            if (!part) {
                c.text = "nac";
                return;
            }
            SchwarzPreconditioner P = setup(A, *part, kind);
            SolveReport rep = (c.method == "pcg") ? cg(A, b, tol, -1, &P)
                                                  : gmres(A, b, tol, -1, &P, restart);
            c.text = std::to_string(rep.iterations);
        });
        body << "method,nu";
        for (int n : ctx.ns) body << ",n=" << n;
        body << "\n";
        size_t idx = 0;
        for (const char* method : {"cg", "pcg", "gmres", "pgmres"}) {
            bool preconditioned = std::string(method) == "pcg" || std::string(method) == "pgmres";
            for (int nu : spec->nus) {
                body << method << ',' << (preconditioned ? nu : 1);
                for (size_t k = 0; k < ctx.ns.size(); ++k) body << ',' << cells[idx + k].text;
                body << "\n";
                idx += ctx.ns.size();
            }
        }
    } else {  // cluster-count / cluster-fraction
        SchwarzKind kind = schwarz_kind_from_string(spec->kind);
        bool fraction = spec->type == "cluster-fraction";
        std::map<std::pair<int, int>, std::vector<std::string>> results;  // (nu,n) -> per-eps
        std::vector<std::pair<int, int>> cells;
        for (int nu : spec->nus)
            for (int n : ctx.ns) cells.emplace_back(nu, n);
        std::mutex mtx;
        run_cells(jobs, static_cast<int>(cells.size()), [&](int idx) {
            auto [nu, n] = cells[idx];
            const StructuredMatrix& A = ctx.assemblies.at(n).matrix;
            std::vector<std::string> vals;
            auto part = make_partition(A.dim, nu, spec->overlap);
            if (!part) {
                vals.assign(spec->eps.size(), "nac");
            } else if (A.dim > kDenseEigGuard) {
                vals.assign(spec->eps.size(), "dim>guard");
            } else {
                SchwarzPreconditioner P = setup(A, *part, kind);
                auto eigs = eigenvalues_dense(dense_preconditioned_image(P));
                ClusterReport rep = cluster_count(eigs, spec->eps);
                for (size_t e = 0; e < spec->eps.size(); ++e)
                    vals.push_back(fraction ? fmt2(rep.fractions[e])
                                            : std::to_string(rep.counts[e]));
            }
            std::lock_guard<std::mutex> lk(mtx);
            results[{nu, n}] = std::move(vals);
        });
        body << "nu,eps";
        for (int n : ctx.ns) body << ",n=" << n;
        body << "\n";
        for (int nu : spec->nus)
            for (size_t e = 0; e < spec->eps.size(); ++e) {
                body << nu << ',' << fmt(spec->eps[e]);
                for (int n : ctx.ns) body << ',' << results[{nu, n}][e];
                body << "\n";
            }
    }

    std::string text;
    {
        std::ostringstream full;
        write_csv_config(full, cfg);
        full << body.str();
        text = full.str();
    }
    if (out.empty())
        std::cout << text;
    else
        open_out(out) << text;
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"structured-matrix Schwarz preconditioner workbench"};
    app.require_subcommand(1);

    ProblemOptions prob_assemble, prob_solve, prob_spectrum, prob_cluster;
    PrecondOptions pre_solve, pre_spectrum, pre_cluster;
    std::string out_assemble, out_solve, out_spectrum, out_cluster, out_table;
    std::string method = "cg", of = "matrix";
    double tol = 1e-6, tol_table = 1e-6;
    int cap = -1, restart = 20, restart_table = 20;
    bool against_symbol = false;
    int nx = 0, ntheta = 0;
    std::vector<double> eps_list;
    std::string table_id, registry;
    int jobs = 1, max_n = 0;
    bool only_admissibility = false;

    auto* a = app.add_subcommand("assemble", "assemble a model problem and write Matrix Market");
    prob_assemble.attach(a);
    a->add_option("--out", out_assemble, "output basename (writes .mtx and .json)");

    auto* s = app.add_subcommand("solve", "solve A x = 1 with CG or GMRES");
    prob_solve.attach(s, true);
    pre_solve.attach(s);
    s->add_option("--method", method, "cg or gmres")->check(CLI::IsMember({"cg", "gmres"}));
    s->add_option("--tol", tol, "relative tolerance (default 1e-6)");
    s->add_option("--cap", cap, "iteration cap (default dim)");
    s->add_option("--restart", restart, "gmres restart length, 0 = full (default 20)");
    s->add_option("--out", out_solve, "write the JSON report here (default stdout)");

    auto* sp = app.add_subcommand("spectrum", "eigenvalues of A, P, P^{-1}A or I - P^{-1}A");
    prob_spectrum.attach(sp);
    pre_spectrum.attach(sp);
    sp->add_option("--of", of, "matrix | precond | precond-applied | iteration")
        ->check(CLI::IsMember({"matrix", "precond", "precond-applied", "iteration"}));
    sp->add_flag("--against-symbol", against_symbol, "also write sorted symbol branch samples");
    sp->add_option("--nx", nx, "x-grid count for symbol sampling");
    sp->add_option("--ntheta", ntheta, "theta-grid count for symbol sampling");
    sp->add_option("--out", out_spectrum, "output CSV path (default spectrum.csv)");

    auto* cl = app.add_subcommand("cluster", "outlier counts of |eig(P^{-1}A) - 1| > eps");
    prob_cluster.attach(cl);
    pre_cluster.attach(cl);
    cl->add_option("--eps", eps_list, "epsilon list (default 0.1 0.05 0.025)");
    cl->add_option("--out", out_cluster, "write the JSON report here (default stdout)");

    auto* tb = app.add_subcommand("table", "reproduce a registered table as CSV");
    tb->add_option("--id", table_id, "table id from the registry")->required();
    tb->add_option("--registry", registry, "registry path (default: bundled data/tables.json)");
    tb->add_option("--out", out_table, "output CSV path (default stdout)");
    tb->add_option("--jobs", jobs, "concurrent cells (default 1)");
    tb->add_option("--max-n", max_n, "drop columns with n larger than this");
    tb->add_flag("--only-admissibility", only_admissibility, "emit the adm/nac grid only");
    tb->add_option("--tol", tol_table, "relative tolerance (default 1e-6)");
    tb->add_option("--restart", restart_table, "gmres restart length (default 20)");

    try {
        app.parse(argc, argv);
        if (a->parsed()) return cmd_assemble(prob_assemble, out_assemble);
        if (s->parsed())
            return cmd_solve(prob_solve, pre_solve, method, tol, cap, restart, out_solve);
        if (sp->parsed())
            return cmd_spectrum(prob_spectrum, pre_spectrum, of, against_symbol, nx, ntheta,
                                out_spectrum);
        if (cl->parsed()) return cmd_cluster(prob_cluster, pre_cluster, eps_list, out_cluster);
        if (tb->parsed())
            return cmd_table(table_id, registry, out_table, jobs, max_n, only_admissibility,
                             tol_table, restart_table);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitUsage;
}
