#include "gravnet/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gravnet {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::invalid_argument("config: expected boolean, got '" + v + "'");
}

std::vector<std::size_t> parse_size_list(const std::string& v) {
    std::vector<std::size_t> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(std::stoull(trim(item)));
    if (out.empty())
        throw std::invalid_argument("config: empty list");
    return out;
}

} // namespace

void apply_config_entry(RunConfig& c, const std::string& key, const std::string& value) {
    try {
        if (key == "dt") c.dt = std::stod(value);
        else if (key == "G") c.G = std::stod(value);
        else if (key == "eps") c.eps = std::stod(value);
        else if (key == "steps") c.steps = std::stoull(value);
        else if (key == "scenario") c.scenario = value;
        else if (key == "n") c.n = std::stoull(value);
        else if (key == "seed") c.seed = std::stoull(value);
        else if (key == "total_mass") c.total_mass = std::stod(value);
        else if (key == "radial_scale") c.radial_scale = std::stod(value);
        else if (key == "vertical_scale") c.vertical_scale = std::stod(value);
        else if (key == "bh_fraction") c.bh_fraction = std::stod(value);
        else if (key == "arms") c.arms = static_cast<unsigned>(std::stoul(value));
        else if (key == "half_width") c.half_width = std::stod(value);
        else if (key == "disc_count") c.disc_count = std::stoull(value);
        else if (key == "n_per_disc") c.n_per_disc = std::stoull(value);
        else if (key == "separation") c.separation = std::stod(value);
        else if (key == "counts") c.counts = parse_size_list(value);
        else if (key == "scenes_per_count") c.scenes_per_count = std::stoull(value);
        else if (key == "history_depth") c.history_depth = std::stoull(value);
        else if (key == "k") c.k = std::stoull(value);
        else if (key == "d") c.d = std::stoull(value);
        else if (key == "L") c.layers = std::stoull(value);
        else if (key == "with_edge_attrs") c.with_edge_attrs = parse_bool(value);
        else if (key == "project_back") c.project_back = parse_bool(value);
        else if (key == "epochs") c.epochs = std::stoull(value);
        else if (key == "batch_size") c.batch_size = std::stoull(value);
        else if (key == "lr") c.lr = std::stod(value);
        else if (key == "train_fraction") c.train_fraction = std::stod(value);
        else if (key == "threads") c.threads = std::stoi(value);
        else throw std::invalid_argument("config: unknown key '" + key + "'");
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad value '" + value + "' for key '" + key + "'");
    }
}

RunConfig parse_config_file(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("config: cannot open " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                        " is not 'key = value'");
        apply_config_entry(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return base;
}

std::string config_help() {
    return
        "Config keys (file: 'key = value', '#' comments; flags override file):\n"
        "  dt               = 0.0001    time step               [reference profile]\n"
        "  G                = 4.5e-6    gravitational constant  [reference profile]\n"
        "  eps              = 0.05      softening length        [implementation default]\n"
        "  steps            = 1000      steps per simulation    [reference profile]\n"
        "  scenario         = spiral    spiral|disc|cloud|multidisc\n"
        "  n                = 100       bodies per scene\n"
        "  seed             = 0         master RNG seed\n"
        "  total_mass       = 1.0       galaxy mass             [reference profile]\n"
        "  radial_scale     = 3.0       disc radial scale       [reference profile]\n"
        "  vertical_scale   = 0.3       disc vertical scale     [reference profile]\n"
        "  bh_fraction      = 0.01      black hole mass share   [reference profile]\n"
        "  arms             = 2         spiral arm count        [reference profile]\n"
        "  half_width       = 3.0       cloud half width        [implementation default]\n"
        "  disc_count       = 2         discs in multidisc      [implementation default]\n"
        "  n_per_disc       = 50        bodies per disc         [implementation default]\n"
        "  separation       = 10.0      disc centre spacing     [implementation default]\n"
        "  counts           = 3,25,50,100,250,500  dataset particle counts [reference profile]\n"
        "  scenes_per_count = 10        scenes per count        [reference profile]\n"
        "  history_depth    = 0         past frames in features [implementation default]\n"
        "  k                = 8         KNN neighbours          [implementation default]\n"
        "  d                = 64        latent width            [implementation default]\n"
        "  L                = 2         message-passing layers  [implementation default]\n"
        "  with_edge_attrs  = false     edge distance attrs     [reference profile: off]\n"
        "  project_back     = false     project widths back to d [implementation default]\n"
        "  epochs           = 100       training epochs         [implementation default]\n"
        "  batch_size       = 8         graphs per batch        [implementation default]\n"
        "  lr               = 1e-3      Adam learning rate      [implementation default]\n"
        "  train_fraction   = 0.9       scene-level split       [reference profile]\n"
        "  threads          = 1         worker cap (env GRAVNET_THREADS)\n";
}

} // namespace gravnet
