#pragma once

// JSON encodings for every public type: to_json/from_json pairs usable with
// nlohmann::json's value conversions (j = obj; obj = j.get<T>()).
//
// Conventions shared by all encodings:
//   - objects carry exactly their documented keys; parsing rejects unknown
//     or missing keys with ConfigError;
//   - enums are lowercase snake_case strings;
//   - integer-keyed maps serialize as arrays of [key, value] pairs in
//     ascending key order;
//   - real fields admit non-finite values as the strings "inf", "-inf",
//     "nan"; finite values stay plain JSON numbers;
//   - emitted objects have lexicographically ordered keys, so a dump of the
//     same data is byte-identical across runs.

#include <json.hpp>

#include "shadowlab/conjugacy.hpp"
#include "shadowlab/hyperbolicity.hpp"
#include "shadowlab/operators.hpp"
#include "shadowlab/shadowing.hpp"
#include "shadowlab/spaces.hpp"
#include "shadowlab/weights.hpp"
#include "shadowlab/window.hpp"

namespace shadowlab {

// windows and vectors
void to_json(nlohmann::json& j, const IndexWindow& w);
void from_json(const nlohmann::json& j, IndexWindow& w);
void to_json(nlohmann::json& j, const SeqVec& x);
void from_json(const nlohmann::json& j, SeqVec& x);

// weights
void to_json(nlohmann::json& j, const TailRule& t);
void from_json(const nlohmann::json& j, TailRule& t);
void to_json(nlohmann::json& j, const WeightSequence& w);
void from_json(const nlohmann::json& j, WeightSequence& w);

// graded seminorms
void to_json(nlohmann::json& j, const KotheMatrix& m);
void from_json(const nlohmann::json& j, KotheMatrix& m);
void to_json(nlohmann::json& j, const SeminormFamily& f);
void from_json(const nlohmann::json& j, SeminormFamily& f);

// operators
void to_json(nlohmann::json& j, const ShiftOperator& op);
void from_json(const nlohmann::json& j, ShiftOperator& op);
void to_json(nlohmann::json& j, const ScalarOperator& op);
void from_json(const nlohmann::json& j, ScalarOperator& op);
void to_json(nlohmann::json& j, const LinearOp& op);
void from_json(const nlohmann::json& j, LinearOp& op);
void to_json(nlohmann::json& j, const MultiplicationOperator& op);
void from_json(const nlohmann::json& j, MultiplicationOperator& op);
void to_json(nlohmann::json& j, const GradeConditionVerdict& v);
void from_json(const nlohmann::json& j, GradeConditionVerdict& v);
void to_json(nlohmann::json& j, const GradeConditionReport& r);
void from_json(const nlohmann::json& j, GradeConditionReport& r);
void to_json(nlohmann::json& j, const CompactVerdict& v);
void from_json(const nlohmann::json& j, CompactVerdict& v);

// splitting certificates
void to_json(nlohmann::json& j, const GradeConstants& g);
void from_json(const nlohmann::json& j, GradeConstants& g);
void to_json(nlohmann::json& j, const GHCertificate& c);
void from_json(const nlohmann::json& j, GHCertificate& c);
void to_json(nlohmann::json& j, const SplitDetection& d);
void from_json(const nlohmann::json& j, SplitDetection& d);
void to_json(nlohmann::json& j, const DeltaForEps& d);
void from_json(const nlohmann::json& j, DeltaForEps& d);

// expansivity
void to_json(nlohmann::json& j, const GrowthSlots& s);
void from_json(const nlohmann::json& j, GrowthSlots& s);
void to_json(nlohmann::json& j, const BranchEvidence& b);
void from_json(const nlohmann::json& j, BranchEvidence& b);
void to_json(nlohmann::json& j, const GradeBranches& g);
void from_json(const nlohmann::json& j, GradeBranches& g);
void to_json(nlohmann::json& j, const ExpansivityVerdict& v);
void from_json(const nlohmann::json& j, ExpansivityVerdict& v);
void to_json(nlohmann::json& j, const WitnessSample& s);
void from_json(const nlohmann::json& j, WitnessSample& s);
void to_json(nlohmann::json& j, const WitnessReport& r);
void from_json(const nlohmann::json& j, WitnessReport& r);
void to_json(nlohmann::json& j, const DoublingResult& d);
void from_json(const nlohmann::json& j, DoublingResult& d);
void to_json(nlohmann::json& j, const OrbitScanResult& r);
void from_json(const nlohmann::json& j, OrbitScanResult& r);

// shadowing
void to_json(nlohmann::json& j, const Pseudotrajectory& p);
void from_json(const nlohmann::json& j, Pseudotrajectory& p);
void to_json(nlohmann::json& j, const PseudoValidation& v);
void from_json(const nlohmann::json& j, PseudoValidation& v);
void to_json(nlohmann::json& j, const ShadowReport& r);
void from_json(const nlohmann::json& j, ShadowReport& r);
void to_json(nlohmann::json& j, const VerifyResult& r);
void from_json(const nlohmann::json& j, VerifyResult& r);
void to_json(nlohmann::json& j, const CounterexampleReport& r);
void from_json(const nlohmann::json& j, CounterexampleReport& r);
void to_json(nlohmann::json& j, const AdversarialChain& c);
void from_json(const nlohmann::json& j, AdversarialChain& c);

// conjugacy
void to_json(nlohmann::json& j, const SiteResponse& r);
void from_json(const nlohmann::json& j, SiteResponse& r);
void to_json(nlohmann::json& j, const Perturbation& g);
void from_json(const nlohmann::json& j, Perturbation& g);
void to_json(nlohmann::json& j, const PerturbedMap& m);
void from_json(const nlohmann::json& j, PerturbedMap& m);
void to_json(nlohmann::json& j, const SeriesResult& r);
void from_json(const nlohmann::json& j, SeriesResult& r);
void to_json(nlohmann::json& j, const ConjugacyPoint& p);
void from_json(const nlohmann::json& j, ConjugacyPoint& p);
void to_json(nlohmann::json& j, const SemiconjugacyReport& r);
void from_json(const nlohmann::json& j, SemiconjugacyReport& r);
void to_json(nlohmann::json& j, const RadialStage& s);
void from_json(const nlohmann::json& j, RadialStage& s);
void to_json(nlohmann::json& j, const BallHomeo& h);
void from_json(const nlohmann::json& j, BallHomeo& h);

} // namespace shadowlab
