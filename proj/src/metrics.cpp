// Copyright 2026 The Wikibench Authors
// SPDX-License-Identifier: Apache-2.0

#include "wikibench/metrics.hpp"

namespace wikibench::metrics {

EntityStats entity_stats(const EntityId& entity, std::string external_ref,
                         const LabelSchema& schema,
                         const std::vector<IndividualLabel>& labels,
                         const QuadrantThresholds& thresholds) {
  EntityStats out;
  out.entity = entity;
  out.external_ref = std::move(external_ref);
  out.n_labels = labels.size();
  for (std::size_t d = 0; d < schema.dimensions.size(); ++d) {
    const auto& name = schema.dimensions[d].name;
    std::vector<LabelValue> column;
    column.reserve(labels.size());
    for (const auto& label : labels) {
      for (const auto& v : label.values) {
        if (v.dimension == name) column.push_back(v);
      }
    }
    DimensionStats ds;
    ds.dimension = name;
    ds.disagreement = disagreement(column);
    ds.low_conf_fraction = low_conf_fraction(column);
    ds.quadrant = column.size() < 2
                      ? Quadrant::kInsufficient
                      : quadrant(ds.disagreement, ds.low_conf_fraction, thresholds);
    out.dimensions.push_back(std::move(ds));
  }
  return out;
}

CampaignStats campaign_stats(const Campaign& campaign,
                             const std::vector<EntitySnapshot>& entities) {
  CampaignStats out;
  for (const auto& dim : campaign.schema.dimensions) {
    out.primary_composition.push_back(ChoiceComposition{dim.name});
    auto& tags = out.quadrant_counts[dim.name];
    for (auto q : {Quadrant::kClearCut, Quadrant::kAmbiguous, Quadrant::kGenuineDifference,
                   Quadrant::kAgreedEdgeCase, Quadrant::kInsufficient}) {
      tags[std::string(to_string(q))] = 0;
    }
  }
  for (const auto& snap : entities) {
    if (snap.entity.excluded) continue;
    ++out.n_entities;
    out.n_labels += snap.labels.size();
    for (const auto& label : snap.labels) ++out.labels_per_user[label.author.str()];
    auto stats = entity_stats(snap.entity.id, snap.entity.external_ref, campaign.schema,
                              snap.labels, campaign.thresholds);
    for (const auto& ds : stats.dimensions) {
      ++out.quadrant_counts[ds.dimension][std::string(to_string(ds.quadrant))];
    }
    if (snap.primary) {
      ++out.n_labeled;
      for (auto& comp : out.primary_composition) {
        auto it = snap.primary->values.find(comp.dimension);
        if (it == snap.primary->values.end()) continue;
        if (it->second == Choice::kPositive) {
          ++comp.positive;
        } else {
          ++comp.negative;
        }
      }
    }
    out.entities.push_back(std::move(stats));
  }
  for (auto& comp : out.primary_composition) {
    const auto total = comp.positive + comp.negative;
    if (total == 0) continue;
    comp.positive_fraction = static_cast<double>(comp.positive) / static_cast<double>(total);
    comp.negative_fraction = static_cast<double>(comp.negative) / static_cast<double>(total);
  }
  return out;
}

}  // namespace wikibench::metrics
