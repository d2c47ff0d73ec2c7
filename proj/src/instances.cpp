#include "modt/instances.hpp"

#include "modt/csv.hpp"

namespace modt {

namespace {

MultimodalNetwork load_instance(const char* nodes, const char* lines,
                                const char* links, const char* demand) {
  return MultimodalNetwork::load(CsvTable::from_string(nodes, "nodes.csv"),
                                 CsvTable::from_string(links, "links.csv"),
                                 CsvTable::from_string(lines, "lines.csv"),
                                 CsvTable::from_string(demand, "demand.csv"));
}

}  // namespace

Instance figure_one() {
  static const char* kNodes =
      "nodeId,x,y,kind,zone\n"
      "Z1,0,2,Centroid,Z1\n"
      "Z2,9,2,Centroid,Z2\n"
      "R1,1.5,3.5,RoadIntersection,Z1\n"
      "R2,4.5,3.5,RoadIntersection,Z1\n"
      "R3,7.5,3.5,RoadIntersection,Z2\n"
      "R4,1.5,0.5,RoadIntersection,Z1\n"
      "R5,4.5,0.5,RoadIntersection,Z1\n"
      "R6,7.5,0.5,RoadIntersection,Z2\n"
      "1,1.5,2,TransitStop,Z1\n"
      "2,4.5,2.8,TransitStop,Z1\n"
      "4,4.5,1.2,TransitStop,Z1\n"
      "8,7.5,2.8,TransitStop,Z2\n"
      "9,7.5,1.2,TransitStop,Z2\n";
  static const char* kLines =
      "lineId,candidate\n"
      "red,1\n"
      "green,1\n"
      "blue,1\n";
  static const char* kLinks =
      "fromNodeId,toNodeId,kind,travelTime,fare,lineId\n"
      "Z1,R1,AccessWalk,3,0,\n"
      "Z1,R4,AccessWalk,3,0,\n"
      "Z1,1,AccessWalk,2,0,\n"
      "R1,R2,Road,4,0,\n"
      "R2,R3,Road,4,0,\n"
      "R4,R5,Road,4,0,\n"
      "R5,R6,Road,4,0,\n"
      "R2,2,ModeTransfer,1,0,\n"
      "R5,4,ModeTransfer,1,0,\n"
      "1,2,Transit,5,0,red\n"
      "2,8,Transit,5,0,red\n"
      "1,4,Transit,4,0,green\n"
      "4,9,Transit,6,0,green\n"
      "2,8,Transit,4,0,blue\n"
      "R3,Z2,EgressWalk,2,0,\n"
      "R6,Z2,EgressWalk,2,0,\n"
      "8,Z2,EgressWalk,2,0,\n"
      "9,Z2,EgressWalk,2,0,\n";
  static const char* kDemand =
      "origin,destination,trips\n"
      "Z1,Z2,100\n";

  Instance inst;
  inst.network = load_instance(kNodes, kLines, kLinks, kDemand);
  inst.design.frequency = {1.0 / 6.0, 1.0 / 2.0, 1.0 / 3.0};
  inst.design.fleet = {100.0, 50.0};
  inst.params = uniform_params(inst.network, 0.0017, 23.0);
  return inst;
}

Instance triangle() {
  static const char* kNodes =
      "nodeId,x,y,kind,zone\n"
      "A,0,0,Centroid,A\n"
      "B,6,0,Centroid,B\n"
      "C,12,0,Centroid,C\n"
      "SA,1,1,TransitStop,A\n"
      "SB,6,1,TransitStop,B\n"
      "SC,11,1,TransitStop,C\n"
      "TA,1,2,TransitStop,A\n"
      "TC,11,2,TransitStop,C\n"
      "RA,1,-1,RoadIntersection,A\n"
      "RB,6,-1,RoadIntersection,B\n"
      "RC,11,-1,RoadIntersection,C\n";
  static const char* kLines =
      "lineId,candidate\n"
      "local,1\n"
      "express,1\n";
  static const char* kLinks =
      "fromNodeId,toNodeId,kind,travelTime,fare,lineId\n"
      "A,SA,AccessWalk,2,0,\n"
      "A,TA,AccessWalk,2,0,\n"
      "A,RA,AccessWalk,1,0,\n"
      "B,SB,AccessWalk,2,0,\n"
      "B,RB,AccessWalk,1,0,\n"
      "SA,SB,Transit,6,0,local\n"
      "SB,SC,Transit,6,0,local\n"
      "TA,TC,Transit,9,0,express\n"
      "RA,RB,Road,5,0,\n"
      "RB,RC,Road,5,0,\n"
      "RA,RC,Road,11,0,\n"
      "SB,B,EgressWalk,2,0,\n"
      "RB,B,EgressWalk,1,0,\n"
      "SC,C,EgressWalk,2,0,\n"
      "TC,C,EgressWalk,2,0,\n"
      "RC,C,EgressWalk,1,0,\n";
  static const char* kDemand =
      "origin,destination,trips\n"
      "A,C,60\n"
      "B,C,40\n"
      "A,B,30\n";

  Instance inst;
  inst.network = load_instance(kNodes, kLines, kLinks, kDemand);
  inst.design.frequency = {1.0 / 6.0, 1.0 / 10.0};
  inst.design.fleet = {20.0, 10.0, 0.01};
  inst.params = uniform_params(inst.network, 0.02, 23.0);
  return inst;
}

Instance feeder() {
  static const char* kNodes =
      "nodeId,x,y,kind,zone\n"
      "A,0,0,Centroid,A\n"
      "B,10,0,Centroid,B\n"
      "S1,1,1,TransitStop,A\n"
      "S2,9,1,TransitStop,B\n"
      "R1,1,-1,RoadIntersection,A\n"
      "R2,9,-1,RoadIntersection,B\n";
  static const char* kLines =
      "lineId,candidate\n"
      "L1,1\n";
  static const char* kLinks =
      "fromNodeId,toNodeId,kind,travelTime,fare,lineId\n"
      "A,S1,AccessWalk,3,0,\n"
      "A,R1,AccessWalk,2,0,\n"
      "R1,S1,ModeTransfer,1,0,\n"
      "S1,S2,Transit,7,0,L1\n"
      "R1,R2,Road,9,0,\n"
      "S2,B,EgressWalk,2,0,\n"
      "R2,B,EgressWalk,2,0,\n";
  static const char* kDemand =
      "origin,destination,trips\n"
      "A,B,50\n";

  Instance inst;
  inst.network = load_instance(kNodes, kLines, kLinks, kDemand);
  inst.design.frequency = {1.0 / 8.0};
  inst.design.fleet = {15.0, 0.01};
  inst.params = uniform_params(inst.network, 0.02, 23.0);
  return inst;
}

}  // namespace modt
