#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iabsim/model.hpp"
#include "iabsim/types.hpp"

namespace iabsim {

struct Site {
    NodeId node_id = 0;
    Position location;
    bool is_donor = false;
};

/// Reads a site list (CSV header `node_id,x_m,y_m,z_m,is_donor`). Rejects
/// duplicate ids and files without a donor; parse errors name the line.
std::vector<Site> ingest_sites(const std::string& path);

/// Reads UE positions (CSV header `ue_id,x_m,y_m,z_m`).
std::vector<Ue> ingest_ues(const std::string& path);

enum class ScenarioKind { manhattan_grid, random_uniform };

ScenarioKind scenario_kind_from_string(const std::string& s);

/// Generator parameters. manhattan_grid places rows*cols sites spacing_m
/// apart with donors corner-first at every donor_every_k-th site (row-major);
/// random_uniform scatters num_nodes in the box with the first donor_count
/// sites as donors. UEs are uniform in the bounding box either way.
struct ScenarioParams {
    ScenarioKind kind = ScenarioKind::manhattan_grid;
    // manhattan_grid
    std::uint32_t rows = 5;
    std::uint32_t cols = 5;
    double spacing_m = 200.0;
    std::uint32_t donor_every_k = 12;
    // random_uniform
    std::uint32_t num_nodes = 25;
    std::uint32_t donor_count = 1;
    double box_x_m = 1000.0;
    double box_y_m = 1000.0;
    // both
    std::uint32_t num_ues = 20;
    double node_height_m = 10.0;
    double ue_height_m = 1.5;
};

struct Scenario {
    std::vector<Site> sites;
    std::vector<Ue> ues;
};

/// Pure function of (params, seed).
Scenario generate_scenario(const ScenarioParams& params, std::uint64_t seed);

void write_sites_csv(const std::string& path, const std::vector<Site>& sites);
void write_ues_csv(const std::string& path, const std::vector<Ue>& ues);

/// Sites -> IabNode list with the configured antenna (cell_id = iab_id).
std::vector<IabNode> sites_to_nodes(const std::vector<Site>& sites,
                                    const SimConfig& config);

}  // namespace iabsim
