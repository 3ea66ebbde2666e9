#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "riesztool/experiments.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

using namespace riesz;

namespace {

std::string temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / name;
    std::filesystem::create_directories(dir);
    return dir.string();
}

}  // namespace

TEST_CASE("fixed seeds give byte-identical CSV artifacts") {
    std::vector<FourierMode> modes(1);
    modes[0].freq = Vec::Ones(1);
    modes[0].amp = Vec::Constant(1, 0.01);
    GraphFunction g = make_graph_function(modes, Vec::Zero(1), Vec::Ones(1), 1.0 / 128, 0.05);
    const std::string dir = temp_dir("rt_bytes");
    for (int run = 0; run < 2; ++run)
        save_measure_csv(gen_perturbed_graph(g, 1e-3, 99), dir + "/m" + std::to_string(run) + ".csv");
    std::ifstream a(dir + "/m0.csv"), b(dir + "/m1.csv");
    std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(sa == sb);
    CHECK(!sa.empty());
}

TEST_CASE("cantor generator guards and determinism") {
    CHECK_THROWS_AS(gen_cantor_four_corner(0), std::invalid_argument);
    CHECK_THROWS_AS(gen_cantor_four_corner(13), std::invalid_argument);
    DiscreteMeasure a = gen_cantor_four_corner(4);
    DiscreteMeasure b = gen_cantor_four_corner(4);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK((a.point(i) - b.point(i)).norm() == 0.0);
}

TEST_CASE("perturbed graph generator") {
    std::vector<FourierMode> modes(1);
    modes[0].freq = Vec::Ones(1);
    modes[0].amp = Vec::Constant(1, 0.01);
    GraphFunction g = make_graph_function(modes, Vec::Zero(1), Vec::Ones(1), 1.0 / 256, 0.05);

    DiscreteMeasure clean = sample_graph_measure(g);
    DiscreteMeasure zero_noise = gen_perturbed_graph(g, 0.0, 42);
    REQUIRE(clean.size() == zero_noise.size());
    for (std::size_t i = 0; i < clean.size(); ++i)
        CHECK((clean.point(i) - zero_noise.point(i)).norm() == 0.0);

    const double amp = 1e-3;
    DiscreteMeasure n1 = gen_perturbed_graph(g, amp, 42);
    DiscreteMeasure n2 = gen_perturbed_graph(g, amp, 42);
    DiscreteMeasure n3 = gen_perturbed_graph(g, amp, 43);
    double max_pert = 0.0, diff_seeds = 0.0;
    for (std::size_t i = 0; i < n1.size(); ++i) {
        CHECK((n1.point(i) - n2.point(i)).norm() == 0.0);  // reproducible
        max_pert = std::max(max_pert, std::abs(n1.point(i)[1] - clean.point(i)[1]));
        diff_seeds = std::max(diff_seeds, (n1.point(i) - n3.point(i)).norm());
    }
    CHECK(max_pert <= amp);
    CHECK(diff_seeds > 0.0);
}

TEST_CASE("experiment configs and manifests") {
    const std::string dir = temp_dir("rt_exp_cfg");
    // config round trip
    {
        nlohmann::json j;
        j["experiment"] = "pv-contrast";
        j["output_dir"] = dir;
        j["params"]["generation"] = 4;
        std::ofstream out(dir + "/cfg.json");
        out << j.dump();
    }
    ExperimentConfig cfg = load_experiment_config(dir + "/cfg.json");
    CHECK(cfg.name == "pv-contrast");
    CHECK(cfg.get("generation", 0) == 4);
    CHECK(cfg.get("missing", 7.5) == 7.5);

    CHECK_THROWS_AS(run_experiment(ExperimentConfig{.name = "nope"}), std::invalid_argument);
}

TEST_CASE("pv-contrast experiment at a small generation") {
    ExperimentConfig cfg;
    cfg.name = "pv-contrast";
    cfg.output_dir = temp_dir("rt_exp_pv");
    cfg.extra = {{"generation", 4.0}};
    ExperimentOutcome out = run_experiment(cfg);
    MESSAGE(out.summary);
    CHECK(out.pass);
    CHECK(std::filesystem::exists(cfg.output_dir + "/pv_contrast.csv"));
    CHECK(std::filesystem::exists(cfg.output_dir + "/pv-contrast_manifest.json"));

    std::ifstream mf(cfg.output_dir + "/pv-contrast_manifest.json");
    nlohmann::json manifest;
    mf >> manifest;
    CHECK(manifest["experiment"] == "pv-contrast");
    CHECK(manifest.contains("config_hash"));
    CHECK(manifest.contains("tolerances"));
}

TEST_CASE("beta-alpha-tables experiment on a small instance") {
    ExperimentConfig cfg;
    cfg.name = "beta-alpha-tables";
    cfg.output_dir = temp_dir("rt_exp_ba");
    cfg.extra = {{"atoms", 512.0}, {"level_min", 2.0}, {"level_max", 3.0}};
    ExperimentOutcome out = run_experiment(cfg);
    MESSAGE(out.summary);
    CHECK(out.pass);  // the exact beta ordering holds on every cube
    CHECK(std::filesystem::exists(cfg.output_dir + "/beta_alpha.csv"));
    CHECK(std::filesystem::exists(cfg.output_dir + "/beta_levels.dat"));
}

TEST_CASE("corona-pipeline experiment on the flat disc") {
    // a flat disc via CSV input exercises the file interface path
    const std::string dir = temp_dir("rt_exp_corona");
    GraphFunction flat = make_graph_function_grid(
        2, 3, Vec::Zero(2), Vec::Ones(2), 1.0 / 64, [](const Vec&) { return Vec::Zero(1); });
    DiscreteMeasure raw = sample_graph_measure(flat);
    // normalize for r0 = 0.06 around the center
    Vec c(3);
    c << 0.5, 0.5, 0.0;
    const double target = unit_ball_volume(2) * std::pow(0.48, 2);
    std::vector<double> w = raw.weights();
    const double measured = raw.mass_in_ball(c, 0.48);
    for (double& ww : w) ww *= target / measured;
    DiscreteMeasure mu = build_measure_flat(raw.coords(), std::move(w), 3, 2);
    save_measure_csv(mu, dir + "/disc.csv");

    ExperimentConfig cfg;
    cfg.name = "corona-pipeline";
    cfg.input_path = dir + "/disc.csv";
    cfg.output_dir = dir;
    cfg.extra = {{"n", 2.0}, {"r0", 0.06}};
    ExperimentOutcome out = run_experiment(cfg);
    MESSAGE(out.summary);
    CHECK(out.pass);
    CHECK(std::filesystem::exists(dir + "/corona_report.json"));
    CHECK(std::filesystem::exists(dir + "/corona_labels.csv"));
    CHECK(std::filesystem::exists(dir + "/corona_graph.csv"));

    std::ifstream rf(dir + "/corona_report.json");
    nlohmann::json rep;
    rf >> rep;
    CHECK(rep["coverage"].get<double>() >= 0.93);
    CHECK(rep["fractions"]["F1"].get<double>() == 0.0);
}
