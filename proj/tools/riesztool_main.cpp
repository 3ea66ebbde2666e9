#include "riesztool/alpha.hpp"
#include "riesztool/experiments.hpp"

#include <iostream>

#include <CLI11.hpp>

using namespace riesz;

namespace {

int cmd_transform(const std::string& input, int n, double eps, const std::string& variant,
                  const std::string& method) {
    DiscreteMeasure mu = load_measure_csv(input, n);
    TransformVariant var = variant == "trunc" ? TransformVariant::truncated
                          : variant == "cutoff" ? TransformVariant::cutoff
                                                : TransformVariant::smoothed;
    EvalMethod m = method == "tree" ? EvalMethod::treecode : EvalMethod::naive;
    FieldResult field = transform_field(mu, mu, eps, m, var);
    std::cout << "target";
    for (int a = 0; a < mu.dim(); ++a) std::cout << ",v" << (a + 1);
    std::cout << ",norm\n";
    for (std::size_t i = 0; i < field.vectors.size(); ++i) {
        std::cout << i;
        for (int a = 0; a < mu.dim(); ++a) std::cout << "," << format_g17(field.vectors[i][a]);
        std::cout << "," << format_g17(field.vectors[i].norm()) << "\n";
    }
    std::cerr << "l2_norm " << format_g17(field.l2_norm) << "\n";
    return 0;
}

int cmd_beta(const std::string& input, int n, const std::string& p, int lmin, int lmax,
             bool ambient) {
    DiscreteMeasure mu = load_measure_csv(input, n);
    BetaP bp = p == "1" ? BetaP::one : p == "inf" ? BetaP::infinity : BetaP::two;
    DyadicLattice lat = dyadic_lattice(mu, lmin, lmax,
                                       ambient ? LatticeMode::ambient : LatticeMode::graph);
    std::cout << "level,index,value\n";
    for (const DyadicCube& q : lat.cubes) {
        BetaResult r = beta_number(mu, q, bp);
        std::cout << q.level << "," << q.index[0] << "," << format_g17(r.value) << "\n";
    }
    return 0;
}

int cmd_alpha(const std::string& input, int n, int lmin, int lmax, bool ambient) {
    DiscreteMeasure mu = load_measure_csv(input, n);
    DyadicLattice lat = dyadic_lattice(mu, lmin, lmax,
                                       ambient ? LatticeMode::ambient : LatticeMode::graph);
    std::cout << "level,index,value,gap\n";
    for (const DyadicCube& q : lat.cubes) {
        AlphaResult r = alpha_number(mu, q);
        std::cout << q.level << "," << q.index[0] << "," << format_g17(r.alpha) << ","
                  << format_g17(r.gap) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical toolkit for Riesz transforms and multiscale geometry"};
    app.require_subcommand(1);

    std::string input, output = "measure.csv", variant = "smooth", method = "naive", p = "2";
    std::string spec_path, config_path, ball_spec;
    int n = 1, lmin = 0, lmax = 4, generation = 4;
    double eps = 1e-2, eps1 = 1e-3, eps2 = 1e-1;
    double delta0 = 0.25, alpha = 0.05, epsc = 1e-4;
    bool ambient = false;
    std::uint64_t seed = 1;

    auto* t = app.add_subcommand("transform", "evaluate a Riesz transform field");
    t->add_option("--input", input)->required();
    t->add_option("--n", n);
    t->add_option("--eps", eps)->required();
    t->add_option("--variant", variant)->check(CLI::IsMember({"trunc", "smooth", "cutoff"}));
    t->add_option("--method", method)->check(CLI::IsMember({"naive", "tree"}));

    auto* b = app.add_subcommand("beta", "beta numbers over a dyadic lattice");
    b->add_option("--input", input)->required();
    b->add_option("--n", n);
    b->add_option("--p", p)->check(CLI::IsMember({"1", "2", "inf"}));
    b->add_option("--level-min", lmin);
    b->add_option("--level-max", lmax);
    b->add_flag("--ambient", ambient);

    auto* a = app.add_subcommand("alpha", "alpha coefficients over a dyadic lattice");
    a->add_option("--input", input)->required();
    a->add_option("--n", n);
    a->add_option("--level-min", lmin);
    a->add_option("--level-max", lmax);
    a->add_flag("--ambient", ambient);

    auto* gg = app.add_subcommand("graph-gen", "sample a graph measure from a JSON spec");
    gg->add_option("--spec", spec_path)->required();
    gg->add_option("--output", output);
    gg->add_option("--seed", seed);
    double noise = 0.0;
    gg->add_option("--noise", noise);

    auto* fc = app.add_subcommand("fourier-check", "band comparability report");
    fc->add_option("--spec", spec_path);
    int jmin = 4, jmax = 8, kmin = 2, kmax = 6;
    fc->add_option("--jmin", jmin);
    fc->add_option("--jmax", jmax);
    fc->add_option("--kmin", kmin);
    fc->add_option("--kmax", kmax);

    auto* pv = app.add_subcommand("pv-oscillation", "principal-value oscillation at a point");
    pv->add_option("--input", input)->required();
    pv->add_option("--n", n);
    pv->add_option("--eps1", eps1);
    pv->add_option("--eps2", eps2);
    int target = 0;
    pv->add_option("--target", target);

    auto* co = app.add_subcommand("corona", "corona pipeline on a point cloud");
    co->add_option("--input", input);
    co->add_option("--n", n);
    co->add_option("--ball", ball_spec, "cx,...,r");
    co->add_option("--delta0", delta0);
    co->add_option("--alpha", alpha);
    co->add_option("--eps", epsc);
    std::string outdir = ".";
    co->add_option("--output-dir", outdir);

    auto* cant = app.add_subcommand("cantor", "four-corner Cantor cloud to CSV");
    cant->add_option("--generation", generation);
    cant->add_option("--output", output);

    auto* ex = app.add_subcommand("experiment", "run a named experiment from a config");
    ex->add_option("--config", config_path)->required();
    ex->add_option("--seed", seed);

    CLI11_PARSE(app, argc, argv);

    try {
        if (t->parsed()) return cmd_transform(input, n, eps, variant, method);
        if (b->parsed()) return cmd_beta(input, n, p, lmin, lmax, ambient);
        if (a->parsed()) return cmd_alpha(input, n, lmin, lmax, ambient);
        if (gg->parsed()) {
            GraphFunction g = load_graph_spec(spec_path);
            DiscreteMeasure mu = noise > 0.0 ? gen_perturbed_graph(g, noise, seed)
                                             : sample_graph_measure(g);
            save_measure_csv(mu, output);
            std::cerr << "wrote " << output << " (" << mu.size() << " atoms, mass "
                      << format_g17(mu.total_mass()) << ")\n";
            return 0;
        }
        if (fc->parsed()) {
            ExperimentConfig cfg;
            cfg.name = "fourier-check";
            cfg.input_path = spec_path;
            cfg.extra = {{"jmin", double(jmin)}, {"jmax", double(jmax)},
                         {"kmin", double(kmin)}, {"kmax", double(kmax)}};
            ExperimentOutcome out = run_experiment(cfg);
            std::cout << out.summary << "\n";
            return out.pass ? 0 : 2;
        }
        if (pv->parsed()) {
            DiscreteMeasure mu = load_measure_csv(input, n);
            std::cout << format_g17(pv_oscillation(mu, mu.point(target), eps1, eps2)) << "\n";
            return 0;
        }
        if (co->parsed()) {
            ExperimentConfig cfg;
            cfg.name = "corona-pipeline";
            cfg.input_path = input;
            cfg.output_dir = outdir;
            cfg.constants.delta0 = delta0;
            cfg.constants.alpha = alpha;
            cfg.constants.eps = epsc;
            if (!ball_spec.empty()) {
                std::vector<double> vals;
                std::stringstream ss(ball_spec);
                std::string cell;
                while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
                cfg.extra.emplace_back("r0", vals.back());
                for (std::size_t a = 0; a + 1 < vals.size(); ++a)
                    cfg.extra.emplace_back("b" + std::to_string(a), vals[a]);
            }
            ExperimentOutcome out = run_experiment(cfg);
            std::cout << out.summary << "\n";
            return out.pass ? 0 : 2;
        }
        if (cant->parsed()) {
            save_measure_csv(gen_cantor_four_corner(generation), output);
            return 0;
        }
        if (ex->parsed()) {
            ExperimentConfig cfg = load_experiment_config(config_path);
            cfg.seed = seed;
            ExperimentOutcome out = run_experiment(cfg);
            std::cout << out.summary << "\n";
            return out.pass ? 0 : 2;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
