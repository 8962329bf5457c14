#include "CLI11.hpp"
#include "json.hpp"

#include "qgraph/bethe.hpp"
#include "qgraph/pipeline.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw qgraph::Error(qgraph::ErrorCode::IoError, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& dir, const std::string& name, const std::string& text) {
    std::filesystem::create_directories(dir);
    const std::string path = dir + "/" + name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw qgraph::Error(qgraph::ErrorCode::IoError, "cannot write " + path);
    out << text;
}

qgraph::EigenRequest::Mode parse_mode(const std::string& s) {
    if (s == "auto") return qgraph::EigenRequest::Mode::Auto;
    if (s == "dense") return qgraph::EigenRequest::Mode::Dense;
    if (s == "shift-invert") return qgraph::EigenRequest::Mode::ShiftInvert;
    throw qgraph::Error(qgraph::ErrorCode::ValidationError, "unknown solver mode: " + s);
}

qgraph::WeylTheory theory_for(const qgraph::GraphSpec& spec) {
    const bool bose = spec.statistics == qgraph::Statistics::Bosonic;
    if (spec.particle_count == 2)
        return bose ? qgraph::WeylTheory::Bose2 : qgraph::WeylTheory::Distinguishable2;
    return bose ? qgraph::WeylTheory::BoseN : qgraph::WeylTheory::DistinguishableN;
}

void dump_matrices(const qgraph::GraphSpec& spec, double h, const std::string& out_dir) {
    if (spec.particle_count == 1) {
        const auto op =
            qgraph::assemble_one_particle(spec.graph, spec.resolve_vertex_conditions(), h);
        write_file(out_dir, "K.txt", qgraph::matrix_coordinate_dump(op.K));
        write_file(out_dir, "M.txt", qgraph::matrix_coordinate_dump(op.M));
        return;
    }
    const auto dd =
        qgraph::dissect(spec.graph, spec.particle_count, qgraph::Statistics::Distinguishable);
    const auto mesh = qgraph::build_mesh(dd, h);
    const auto form = qgraph::assemble(spec.graph, mesh, dd, spec.resolve_vertex_conditions(),
                                       spec.contact);
    write_file(out_dir, "K.txt", qgraph::matrix_coordinate_dump(form.K));
    write_file(out_dir, "M.txt", qgraph::matrix_coordinate_dump(form.M));
}

int run_spectrum(const std::string& spec_path, double h, int m, const std::string& out_dir,
                 const std::string& solver, bool dump, bool need_fit) {
    const qgraph::GraphSpec spec = qgraph::parse_graph_spec(read_file(spec_path));
    const qgraph::SpectralResult res =
        qgraph::compute_spectrum(spec, m, h, parse_mode(solver));
    write_file(out_dir, "eigenvalues.csv", qgraph::spectrum_csv(res));
    write_file(out_dir, "report.json", qgraph::report_json(spec, res));
    if (need_fit || (res.count() >= 100 && spec.particle_count >= 2)) {
        const auto fit = qgraph::weyl_fit(res, theory_for(spec), spec.graph);
        write_file(out_dir, "weyl.json", qgraph::weyl_json(fit));
    }
    if (dump) dump_matrices(spec, h, out_dir);
    std::cout << "wrote " << res.count() << " eigenvalues to " << out_dir
              << "/eigenvalues.csv\n";
    return 0;
}

int run_bracket(const std::string& spec_path, double h, int m, const std::string& out_dir) {
    const qgraph::GraphSpec spec = qgraph::parse_graph_spec(read_file(spec_path));
    const qgraph::BracketReport rep = qgraph::bracketing_check(spec, m, h);
    json j;
    j["violations"] = rep.violations;
    j["levels"] = rep.levels;
    j["count_dirichlet"] = rep.count_dirichlet;
    j["count_physical"] = rep.count_physical;
    j["count_robin"] = rep.count_robin;
    write_file(out_dir, "bracket.json", j.dump(2) + "\n");
    std::cout << "bracketing violations: " << rep.violations << "\n";
    return rep.violations == 0 ? 0 : 1;
}

int run_oracle(int n, double length, double c, int m, const std::string& out_dir) {
    const auto sols = qgraph::bethe_spectrum(n, length, c, m);
    std::string csv = "index,energy,quantum_numbers\n";
    char buf[64];
    for (size_t i = 0; i < sols.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.15g,", i, sols[i].energy);
        csv += buf;
        for (size_t q = 0; q < sols[i].quantum_numbers.size(); ++q) {
            std::snprintf(buf, sizeof buf, "%s%.15g", q ? ";" : "",
                          sols[i].quantum_numbers[q]);
            csv += buf;
        }
        csv += "\n";
        std::printf("%zu %.15g\n", i, sols[i].energy);
    }
    write_file(out_dir, "oracle.csv", csv);
    return 0;
}

int run_validate(const std::string& spec_path, const std::string& out_dir) {
    const qgraph::GraphSpec spec = qgraph::parse_graph_spec(read_file(spec_path));
    const qgraph::VertexConditions vc = spec.resolve_vertex_conditions();
    const auto rep = qgraph::validate_pl(vc, spec.contact, spec.graph);
    write_file(out_dir, "report.json", qgraph::report_json(spec, qgraph::SpectralResult{}));
    for (const auto& f : rep.failures) std::cout << "failure: " << f << "\n";
    for (const auto& w : qgraph::check_regularity_hypotheses(vc, spec.contact))
        std::cout << "advisory: " << w << "\n";
    if (!rep.pass)
        throw qgraph::Error(qgraph::ErrorCode::ValidationError,
                            "vertex/contact conditions failed validation");
    std::cout << "ok\n";
    return 0;
}

int run_converge(const std::string& spec_path, int m, const std::vector<double>& hs,
                 const std::string& out_dir) {
    const qgraph::GraphSpec spec = qgraph::parse_graph_spec(read_file(spec_path));
    const auto study = qgraph::convergence_study(spec, m, hs);
    json j;
    j["h_levels"] = study.h_levels;
    j["eigenvalues"] = study.eigenvalues;
    j["observed_order"] = study.observed_order;
    j["richardson"] = study.richardson;
    j["flagged"] = study.flagged;
    write_file(out_dir, "converge.json", j.dump(2) + "\n");
    std::cout << "flagged eigenvalues: " << study.flagged.size() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral computations for multi-particle quantum graphs"};
    // long-only help: --h is the mesh-width option on several subcommands
    app.set_help_flag("--help", "print this help message and exit");
    app.require_subcommand(1);

    std::string spec_path, out_dir = ".", solver = "auto";
    double h = 0.1;
    int m = 100;
    bool dump = false;

    auto add_common = [&](CLI::App* cmd, bool with_h = true) {
        cmd->add_option("--spec", spec_path, "graph spec JSON")->required();
        cmd->add_option("--out", out_dir, "output directory");
        if (with_h) cmd->add_option("--h", h, "target mesh width")->required();
    };

    auto* sp = app.add_subcommand("spectrum", "compute eigenvalues and sectors");
    add_common(sp);
    sp->add_option("--m", m, "number of eigenvalues");
    sp->add_option("--solver", solver, "auto | dense | shift-invert");
    sp->add_flag("--dump-matrices", dump, "write K and M in coordinate format");

    auto* wf = app.add_subcommand("weyl-fit", "fit the eigenvalue counting slope");
    add_common(wf);
    wf->add_option("--m", m, "number of eigenvalues")->default_val(300);
    wf->add_option("--solver", solver, "auto | dense | shift-invert");

    auto* br = app.add_subcommand("bracket", "Dirichlet/Robin counting comparison");
    add_common(br);
    br->add_option("--m", m, "number of probe levels");

    int oracle_n = 2;
    double oracle_len = 6.283185307179586, oracle_c = 1.0;
    auto* orc = app.add_subcommand("oracle", "ring Bethe-ansatz energies");
    orc->add_option("--n", oracle_n, "particle count")->required();
    orc->add_option("--length", oracle_len, "ring circumference")->required();
    orc->add_option("--c", oracle_c, "ring coupling (half the delta contact strength)")
        ->required();
    orc->add_option("--m", m, "number of levels")->required();
    orc->add_option("--out", out_dir, "output directory");

    auto* va = app.add_subcommand("validate", "check spec and conditions");
    add_common(va, false);

    std::vector<double> h_levels;
    auto* cv = app.add_subcommand("converge", "observed convergence orders");
    cv->add_option("--spec", spec_path, "graph spec JSON")->required();
    cv->add_option("--out", out_dir, "output directory");
    cv->add_option("--m", m, "tracked eigenvalues")->default_val(5);
    cv->add_option("--h", h_levels, "mesh widths (three or more)")->required()->expected(-3);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sp->parsed()) return run_spectrum(spec_path, h, m, out_dir, solver, dump, false);
        if (wf->parsed()) return run_spectrum(spec_path, h, m, out_dir, solver, false, true);
        if (br->parsed()) return run_bracket(spec_path, h, m, out_dir);
        if (orc->parsed()) return run_oracle(oracle_n, oracle_len, oracle_c, m, out_dir);
        if (va->parsed()) return run_validate(spec_path, out_dir);
        if (cv->parsed()) return run_converge(spec_path, m, h_levels, out_dir);
    } catch (const qgraph::Error& e) {
        std::cerr << e.what() << "\n";
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
