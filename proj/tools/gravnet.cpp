#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gravnet/config.hpp"
#include "gravnet/dataset.hpp"
#include "gravnet/errors.hpp"
#include "gravnet/graph.hpp"
#include "gravnet/model.hpp"
#include "gravnet/rng.hpp"
#include "gravnet/rollout.hpp"
#include "gravnet/scenarios.hpp"
#include "gravnet/trainer.hpp"

namespace {

using namespace gravnet;

struct CommonOpts {
    std::string config_file;
    std::vector<std::string> overrides;
    int threads = 0;   // 0 = unset
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_file, "Config file (key = value, '#' comments)");
    cmd->add_option("--set", opts.overrides, "Override a config key, e.g. --set n=25")
        ->take_all();
    cmd->add_option("--threads", opts.threads, "Worker cap (mirrors GRAVNET_THREADS)");
}

RunConfig resolve_config(const CommonOpts& opts) {
    RunConfig config;
    if (const char* env = std::getenv("GRAVNET_THREADS"))
        config.threads = std::atoi(env);
    if (!opts.config_file.empty())
        config = parse_config_file(opts.config_file, config);
    for (const std::string& kv : opts.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
        apply_config_entry(config, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (opts.threads > 0)
        config.threads = opts.threads;
    return config;
}

GalaxyParams galaxy_params(const RunConfig& c) {
    GalaxyParams p;
    p.total_mass = c.total_mass;
    p.radial_scale = c.radial_scale;
    p.vertical_scale = c.vertical_scale;
    p.bh_mass_fraction = c.bh_fraction;
    p.arms = c.arms;
    p.G = c.G;
    p.eps = c.eps;
    return p;
}

ParticleSet make_scenario(const RunConfig& c, std::size_t n, uint64_t seed) {
    if (c.scenario == "spiral") return spiral_galaxy(n, galaxy_params(c), Seed{seed});
    if (c.scenario == "disc") return disc_3d(n, galaxy_params(c), Seed{seed});
    if (c.scenario == "cloud") return random_cloud(n, c.half_width, c.total_mass, Seed{seed});
    if (c.scenario == "multidisc")
        return multi_disc(c.disc_count, c.n_per_disc, galaxy_params(c), c.separation,
                          Seed{seed});
    throw std::invalid_argument("unknown scenario '" + c.scenario + "'");
}

PhysicsParams physics_params(const RunConfig& c) {
    return {c.dt, c.G, c.eps, c.steps};
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open output file " + path);
    return out;
}

int cmd_simulate(const CommonOpts& opts, const std::string& out_path) {
    const RunConfig c = resolve_config(opts);
    const ParticleSet initial = make_scenario(c, c.n, c.seed);
    const Trace trace = simulate(initial, physics_params(c), c.threads);
    Dataset dataset{c.G, c.eps, c.dt, {record_simulation(trace, 0)}};
    save_dataset(dataset, out_path);
    std::cout << "wrote " << out_path << " (1 scene, n=" << c.n << ", steps=" << c.steps
              << ")\n";
    return 0;
}

int cmd_gen_dataset(const CommonOpts& opts, const std::string& out_path) {
    const RunConfig c = resolve_config(opts);
    Dataset dataset{c.G, c.eps, c.dt, {}};
    SplitMix64 seeder(c.seed);
    for (std::size_t count : c.counts)
        for (std::size_t s = 0; s < c.scenes_per_count; ++s) {
            const ParticleSet initial = make_scenario(c, count, seeder.next_u64());
            dataset.scenes.push_back(
                record_simulation(simulate(initial, physics_params(c), c.threads), 0));
            std::cerr << "simulated scene " << dataset.scenes.size() << " (n=" << count
                      << ")\n";
        }
    save_dataset(dataset, out_path);
    std::cout << "wrote " << out_path << " (" << dataset.scenes.size() << " scenes)\n";
    return 0;
}

std::vector<FrameGraph> scene_graphs(const SceneDataset& scene, const GraphConfig& gc,
                                     std::size_t scene_id) {
    std::vector<FrameGraph> graphs;
    graphs.reserve(scene.num_frames());
    for (std::size_t t = 0; t < scene.num_frames(); ++t) {
        FrameGraph g = build_graph(scene.positions[t], frame_features(scene, t),
                                   frame_labels(scene, t), gc);
        g.scene_id = scene_id;
        graphs.push_back(std::move(g));
    }
    return graphs;
}

int cmd_train(const CommonOpts& opts, const std::string& data_path,
              const std::string& model_path) {
    const RunConfig c = resolve_config(opts);
    const Dataset dataset = load_dataset(data_path, c.history_depth);

    auto [train_idx, test_idx] = split_train_test(dataset.scenes.size(), c.train_fraction,
                                                  c.seed);
    GraphConfig gc{c.k, c.with_edge_attrs};
    std::vector<FrameGraph> train_graphs;
    for (std::size_t idx : train_idx) {
        auto graphs = scene_graphs(dataset.scenes[idx], gc, idx);
        for (auto& g : graphs) train_graphs.push_back(std::move(g));
    }

    ModelConfig mc;
    mc.d_in = 4 + 3 * c.history_depth;
    mc.d = c.d;
    mc.num_layers = c.layers;
    mc.use_edge_encoder = c.with_edge_attrs;
    mc.project_back = c.project_back;
    mc.seed = c.seed;

    TrainConfig tc;
    tc.epochs = c.epochs;
    tc.batch_size = c.batch_size;
    tc.adam.lr = c.lr;
    tc.shuffle_seed = c.seed;
    tc.train_fraction = c.train_fraction;

    std::cout << "epoch,mean_loss,seconds\n";
    auto [params, history] = train(train_graphs, tc, mc, &std::cout);

    for (std::size_t idx : test_idx) {
        auto graphs = scene_graphs(dataset.scenes[idx], gc, idx);
        std::vector<const FrameGraph*> ptrs;
        for (const auto& g : graphs) ptrs.push_back(&g);
        const double loss = evaluate_loss(params, {ptrs})[0];
        std::cout << "test_scene," << idx << ',' << loss << '\n';
    }

    Checkpoint ckpt{std::move(params), c.history_depth, c.k, dataset.G, dataset.eps,
                    dataset.dt};
    save_checkpoint(ckpt, model_path);
    std::cout << "wrote " << model_path << '\n';
    return 0;
}

int cmd_eval(const CommonOpts& opts, const std::string& model_path,
             const std::string& data_path) {
    const RunConfig c = resolve_config(opts);
    const Checkpoint ckpt = load_checkpoint(model_path);
    const Dataset dataset = load_dataset(data_path, ckpt.history_depth);
    GraphConfig gc{ckpt.k, ckpt.params.config.use_edge_encoder};

    std::cout << "scene,n,mean_mse\n";
    for (std::size_t idx = 0; idx < dataset.scenes.size(); ++idx) {
        auto graphs = scene_graphs(dataset.scenes[idx], gc, idx);
        std::vector<const FrameGraph*> ptrs;
        for (const auto& g : graphs) ptrs.push_back(&g);
        std::cout << idx << ',' << dataset.scenes[idx].num_particles() << ','
                  << evaluate_loss(ckpt.params, {ptrs})[0] << '\n';
    }
    return 0;
}

int cmd_rollout(const CommonOpts& opts, const std::string& model_path, uint64_t scene_seed,
                const std::string& csv_path) {
    const RunConfig c = resolve_config(opts);
    const Checkpoint ckpt = load_checkpoint(model_path);
    PhysicsParams pp{ckpt.dt, ckpt.G, ckpt.eps, c.steps};

    RunConfig scen = c;
    scen.G = ckpt.G;
    scen.eps = ckpt.eps;
    const ParticleSet initial = make_scenario(scen, c.n, scene_seed);
    const Trace truth = simulate(initial, pp, c.threads);
    const Trace pred = rollout(ckpt, initial, pp);
    const StepErrors errors = rollout_errors(pred, truth);

    auto out = open_out(csv_path);
    out << "step,mse_pos,mse_vel,mse_acc\n";
    for (std::size_t t = 0; t < errors.mse_pos.size(); ++t)
        out << t << ',' << errors.mse_pos[t] << ',' << errors.mse_vel[t] << ','
            << errors.mse_acc[t] << '\n';
    std::cout << "wrote " << csv_path << " (" << errors.mse_pos.size() << " rows)\n";
    return 0;
}

int cmd_bench(const CommonOpts& opts, const std::string& model_path, std::size_t reps,
              const std::string& csv_path) {
    const RunConfig c = resolve_config(opts);
    Checkpoint ckpt;
    if (!model_path.empty()) {
        ckpt = load_checkpoint(model_path);
    } else {
        ModelConfig mc;
        mc.d_in = 4 + 3 * c.history_depth;
        mc.d = c.d;
        mc.num_layers = c.layers;
        mc.seed = c.seed;
        ckpt = {init_params(mc), c.history_depth, c.k, c.G, c.eps, c.dt};
    }
    PhysicsParams pp{ckpt.dt, ckpt.G, ckpt.eps, c.steps};

    std::vector<ParticleSet> scenes;
    SplitMix64 seeder(c.seed);
    for (std::size_t count : c.counts)
        scenes.push_back(make_scenario(c, count, seeder.next_u64()));

    const auto rows = benchmark_speedup(ckpt, scenes, pp, reps);
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!csv_path.empty()) {
        file = open_out(csv_path);
        out = &file;
    }
    (*out) << "scene,n,t_classical_s,t_surrogate_s,speedup\n";
    for (std::size_t i = 0; i < rows.size(); ++i)
        (*out) << i << ',' << rows[i].n << ',' << rows[i].t_classical_s << ','
               << rows[i].t_surrogate_s << ',' << rows[i].speedup << '\n';
    return 0;
}

int cmd_export_csv(const std::string& data_path, std::size_t scene_idx,
                   const std::string& out_path) {
    const Dataset dataset = load_dataset(data_path);
    if (scene_idx >= dataset.scenes.size())
        throw std::invalid_argument("export-csv: scene index out of range");
    const SceneDataset& scene = dataset.scenes[scene_idx];

    auto out = open_out(out_path);
    out << "step,particle,px,py,pz,vx,vy,vz,ax,ay,az\n";
    for (std::size_t t = 0; t < scene.num_frames(); ++t)
        for (std::size_t i = 0; i < scene.num_particles(); ++i) {
            const Vec3& p = scene.positions[t][i];
            const Vec3& v = scene.velocities[t][i];
            const Vec3& a = scene.accelerations[t][i];
            out << t << ',' << i << ',' << p.x << ',' << p.y << ',' << p.z << ',' << v.x
                << ',' << v.y << ',' << v.z << ',' << a.x << ',' << a.y << ',' << a.z
                << '\n';
        }
    std::cout << "wrote " << out_path << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"gravnet: N-body simulation, GNN surrogate training, and rollout evaluation"};
    app.require_subcommand(1);
    app.footer(gravnet::config_help());

    CommonOpts opts;
    std::string out_path, data_path, model_path, csv_path;
    uint64_t scene_seed = 0;
    std::size_t scene_idx = 0, reps = 5;

    auto* sim = app.add_subcommand("simulate", "Run one classical simulation to a dataset file");
    add_common(sim, opts);
    sim->add_option("--out", out_path, "Output .nbds file")->required();

    auto* gen = app.add_subcommand("gen-dataset", "Generate a multi-scene training dataset");
    add_common(gen, opts);
    gen->add_option("--out", out_path, "Output .nbds file")->required();

    auto* tr = app.add_subcommand("train", "Train the surrogate on a dataset");
    add_common(tr, opts);
    tr->add_option("--data", data_path, "Input .nbds file")->required();
    tr->add_option("--out", model_path, "Output .nbdm checkpoint")->required();

    auto* ev = app.add_subcommand("eval", "Per-scene mean MSE of a checkpoint on a dataset");
    add_common(ev, opts);
    ev->add_option("--model", model_path, "Checkpoint file")->required();
    ev->add_option("--data", data_path, "Dataset file")->required();

    auto* ro = app.add_subcommand("rollout", "Closed-loop rollout vs ground truth, CSV errors");
    add_common(ro, opts);
    ro->add_option("--model", model_path, "Checkpoint file")->required();
    ro->add_option("--scene-seed", scene_seed, "Seed for the evaluation scene");
    ro->add_option("--csv", csv_path, "Output CSV path")->required();

    auto* be = app.add_subcommand("bench", "Wall-clock speedup of surrogate vs classical");
    add_common(be, opts);
    be->add_option("--model", model_path, "Checkpoint file (optional; untrained if omitted)");
    be->add_option("--reps", reps, "Timing repetitions (median taken)");
    be->add_option("--csv", csv_path, "Output CSV path (stdout if omitted)");

    auto* ex = app.add_subcommand("export-csv", "Export one scene's trajectory as CSV");
    ex->add_option("--data", data_path, "Dataset file")->required();
    ex->add_option("--scene", scene_idx, "Scene index");
    ex->add_option("--out", out_path, "Output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (sim->parsed()) return cmd_simulate(opts, out_path);
        if (gen->parsed()) return cmd_gen_dataset(opts, out_path);
        if (tr->parsed()) return cmd_train(opts, data_path, model_path);
        if (ev->parsed()) return cmd_eval(opts, model_path, data_path);
        if (ro->parsed()) return cmd_rollout(opts, model_path, scene_seed, csv_path);
        if (be->parsed()) return cmd_bench(opts, model_path, reps, csv_path);
        if (ex->parsed()) return cmd_export_csv(data_path, scene_idx, out_path);
    } catch (const gravnet::FormatError& e) {
        std::cerr << "format error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
