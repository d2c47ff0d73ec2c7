#pragma once

#include "modt/assignment.hpp"
#include "modt/network.hpp"

namespace modt {

// A study instance: the network plus a reference operating plan and the
// parameters assignment runs need.  All builders assemble their data as CSV
// text and push it through the regular loader.
struct Instance {
  MultimodalNetwork network;
  ServiceDesign design;
  AssignmentParams params;
};

// Two-zone corridor: three one-way transit lines (two of them racing at the
// first stop), two road corridors picked up from MoD waiting nodes, and
// walk transfers onto mid-corridor stops.  The reference design runs the
// lines at 1/6, 1/2 and 1/3 departures per minute with 100 and 50 vehicles
// in the two zones and a matching rate of 0.0017.
Instance figure_one();

// Three zones with two demand destinations: a two-leg line through all
// three, a direct express line, and a road triangle whose middle
// intersection re-matches passengers onto the second zone's fleet.
Instance triangle();

// Two zones, one line, one road corridor, and a mid-route transfer from
// the road pickup point onto the first stop.
Instance feeder();

}  // namespace modt
