#include "cgvm/dataset.hpp"
#include "cgvm/element.hpp"

namespace cgvm {

StatsReport dataset_stats(const Dataset& d) {
    StatsReport r;
    r.sample_count = int(d.samples.size());
    for (const Sample& s : d.samples) {
        const std::string cat = to_string(s.category);
        const int len = int(s.hops.size());
        r.conversation_length_histogram[len]++;
        r.length_histogram_per_category[cat][len]++;
        r.source_per_category[cat][to_string(s.source)]++;
        for (const ElementInstance& e : s.metadata.elements) {
            r.element_frequency_per_category[cat][normalize_label(e.label)]++;
        }
    }
    return r;
}

}  // namespace cgvm
