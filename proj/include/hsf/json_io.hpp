#ifndef HSF_JSON_IO_HPP
#define HSF_JSON_IO_HPP

#include <string>

#include <json.hpp>

#include "hsf/briot_bouquet.hpp"
#include "hsf/dynamics.hpp"
#include "hsf/manifolds.hpp"
#include "hsf/series.hpp"
#include "hsf/verify.hpp"

namespace hsf {

// Complex numbers serialize to [re, im]; series to coefficient lists with
// order metadata. Key order is lexicographic, so identical inputs produce
// byte-identical documents.
nlohmann::json to_json(cplx v);
nlohmann::json to_json(const Series1& s);
nlohmann::json to_json(const ConvergenceVerdict& v);
nlohmann::json to_json(const ManifoldSeries& m);
nlohmann::json to_json(const FormalGraphResult& r);
nlohmann::json to_json(const Trajectory& t);
nlohmann::json to_json(const ClassificationResult& c);
nlohmann::json to_json(const ScalingReport& r);
nlohmann::json to_json(const AttractionReport& r);
nlohmann::json to_json(const HyperbolicityReport& r);
nlohmann::json to_json(const PersistenceReport& r);

// tau, Re z, Im z, Re w, Im w rows.
std::string trajectory_csv(const Trajectory& t);

}  // namespace hsf

#endif
