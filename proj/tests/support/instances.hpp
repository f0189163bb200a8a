#pragma once

#include <vector>

#include "aircargo/model.hpp"

// Canonical benchmark scenarios used across the test suites.
namespace testsupport {

using aircargo::ContainerSpec;
using aircargo::ContainerType;
using aircargo::ProblemInstance;

// Six medium containers, four positions, 8000 kg capacity. The small
// benchmark whose exact optimum is 7500 kg.
inline ProblemInstance small_instance() {
    ProblemInstance inst;
    inst.containers = {
        {1, ContainerType::T1, 2134.0}, {2, ContainerType::T1, 3455.0},
        {3, ContainerType::T1, 1866.0}, {4, ContainerType::T1, 1699.0},
        {5, ContainerType::T1, 3500.0}, {6, ContainerType::T1, 3332.0},
    };
    inst.num_positions = 4;
    inst.length = 40.0;
    inst.max_payload = 8000.0;
    inst.empty_mass = 120000.0;
    inst.empty_cog = 0.0;
    inst.shear_max_0 = 26000.0;
    inst.cog_min = -4.0;
    inst.cog_max = 8.0;
    inst.cog_target = 4.0;
    inst.constraints = {true, false, false};
    return inst;
}

// The 35-container, 20-position scenario: 20 medium, 10 small and 5 large
// containers, 40000 kg capacity, CoG bounds [-0.1L, 0.2L], target 0.1L.
inline ProblemInstance large_instance() {
    ProblemInstance inst;
    const std::vector<double> t1 = {2134, 3455, 1866, 1699, 3500, 3332, 2578,
                                    2315, 1888, 1786, 3277, 2987, 2534, 2111,
                                    2607, 1566, 1765, 1946, 1732, 1641};
    const std::vector<double> t2 = {1800, 986, 873, 1764, 1239,
                                    1487, 769, 836, 659, 765};
    const std::vector<double> t3 = {3132, 3530, 3892, 3464, 3282};
    int id = 1;
    for (double m : t1) inst.containers.push_back({id++, ContainerType::T1, m});
    for (double m : t2) inst.containers.push_back({id++, ContainerType::T2, m});
    for (double m : t3) inst.containers.push_back({id++, ContainerType::T3, m});
    inst.num_positions = 20;
    inst.length = 40.0;
    inst.max_payload = 40000.0;
    inst.empty_mass = 120000.0;
    inst.empty_cog = 0.0;
    inst.shear_max_0 = 26000.0;
    inst.cog_min = -4.0;
    inst.cog_max = 8.0;
    inst.cog_target = 4.0;
    inst.constraints = {true, true, true};
    return inst;
}

}  // namespace testsupport
