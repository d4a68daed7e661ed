// Copyright 2026 the jpdkit authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "jpd/analysis.hpp"
#include "jpd/audio.hpp"
#include "jpd/pipeline.hpp"
#include "jpd/psychometrics.hpp"
#include "jpd/resynth.hpp"
#include "jpd/simulate.hpp"
#include "jpd/staircase.hpp"
#include "jpd/synth.hpp"
#include "jpd/units.hpp"

namespace py = pybind11;
using namespace jpd;

namespace {

Waveform waveform_from_array(py::array_t<double, py::array::c_style | py::array::forcecast> samples,
                             double sample_rate) {
    Waveform wf;
    wf.sample_rate = sample_rate;
    wf.samples.assign(samples.data(), samples.data() + samples.size());
    return wf;
}

py::array_t<double> array_from_waveform(const Waveform& wf) {
    return py::array_t<double>(static_cast<py::ssize_t>(wf.samples.size()),
                               wf.samples.data());
}

}  // namespace

PYBIND11_MODULE(_jpd, m) {
    m.doc() = "vowel continuum synthesis, mimicry simulation, and JPD estimation";

    py::register_exception<jpd::error>(m, "JpdError");

    // units
    m.def("hz_to_mel", &hz_to_mel, py::arg("f_hz"));
    m.def("mel_to_hz", &mel_to_hz, py::arg("mels"));
    py::class_<FormantPoint>(m, "FormantPoint")
        .def(py::init<>())
        .def(py::init([](double f1, double f2) { return FormantPoint{f1, f2}; }),
             py::arg("f1_hz"), py::arg("f2_hz"))
        .def_readwrite("f1_hz", &FormantPoint::f1_hz)
        .def_readwrite("f2_hz", &FormantPoint::f2_hz)
        .def("__repr__", [](const FormantPoint& p) {
            return "FormantPoint(" + std::to_string(p.f1_hz) + ", " +
                   std::to_string(p.f2_hz) + ")";
        });
    m.def("mel_distance",
          py::overload_cast<const FormantPoint&, const FormantPoint&>(&mel_distance),
          py::arg("a"), py::arg("b"));

    // audio
    py::class_<Waveform>(m, "Waveform")
        .def(py::init(&waveform_from_array), py::arg("samples"), py::arg("sample_rate"))
        .def_property_readonly("samples", &array_from_waveform)
        .def_readonly("sample_rate", &Waveform::sample_rate)
        .def_property_readonly("duration", &Waveform::duration);
    m.def("read_wav", &read_wav, py::arg("path"));
    m.def("write_wav", &write_wav, py::arg("path"), py::arg("waveform"));
    m.def("resample", &resample, py::arg("waveform"), py::arg("new_rate"));

    // synthesis
    py::class_<PitchContour>(m, "PitchContour")
        .def(py::init<>())
        .def_readwrite("mean_f0_hz", &PitchContour::mean_f0_hz)
        .def_readwrite("start_frac", &PitchContour::start_frac)
        .def_readwrite("peak_frac", &PitchContour::peak_frac)
        .def_readwrite("end_frac", &PitchContour::end_frac)
        .def_readwrite("peak_position", &PitchContour::peak_position)
        .def("at", &PitchContour::at, py::arg("t"));
    py::class_<StimulusSpec>(m, "StimulusSpec")
        .def(py::init<>())
        .def_readwrite("id", &StimulusSpec::id)
        .def_readwrite("target", &StimulusSpec::target)
        .def_readwrite("duration_s", &StimulusSpec::duration_s)
        .def_readwrite("f0", &StimulusSpec::f0);
    py::enum_<ContinuumMode>(m, "ContinuumMode")
        .value("PARAMETRIC", ContinuumMode::kParametric)
        .value("RESYNTHESIS", ContinuumMode::kResynthesis);
    py::class_<Continuum>(m, "Continuum")
        .def(py::init<>())
        .def_readonly("mode", &Continuum::mode)
        .def_readonly("sample_rate", &Continuum::sample_rate)
        .def_readonly("stimuli", &Continuum::stimuli)
        .def_readonly("audio", &Continuum::audio)
        .def_readonly("flags", &Continuum::flags);
    py::class_<SynthesizerSettings>(m, "SynthesizerSettings").def(py::init<>());
    m.def("render_vowel", &render_vowel, py::arg("spec"), py::arg("sample_rate"),
          py::arg("settings") = SynthesizerSettings{});
    m.def("build_parametric_continuum", &build_parametric_continuum,
          py::arg("endpoint_a"), py::arg("endpoint_b"), py::arg("n"),
          py::arg("duration_s"), py::arg("f0"), py::arg("sample_rate") = 16000.0,
          py::arg("settings") = SynthesizerSettings{});
    m.def("write_continuum", &write_continuum, py::arg("continuum"), py::arg("dir"),
          py::arg("settings") = SynthesizerSettings{});
    m.def("read_continuum", &read_continuum, py::arg("manifest_path"));

    // analysis
    py::class_<AnalysisSettings>(m, "AnalysisSettings")
        .def(py::init<>())
        .def_readwrite("window_s", &AnalysisSettings::window_s)
        .def_readwrite("step_s", &AnalysisSettings::step_s)
        .def_readwrite("lpc_order", &AnalysisSettings::lpc_order)
        .def_readwrite("preemphasis_hz", &AnalysisSettings::preemphasis_hz);
    py::class_<MeasurementPoint>(m, "MeasurementPoint")
        .def_readonly("time_s", &MeasurementPoint::time_s)
        .def_readonly("point", &MeasurementPoint::point);
    py::class_<FormantBW>(m, "FormantBW")
        .def_readonly("frequency_hz", &FormantBW::frequency_hz)
        .def_readonly("bandwidth_hz", &FormantBW::bandwidth_hz);
    py::class_<FormantFrame>(m, "FormantFrame")
        .def_readonly("time_s", &FormantFrame::time_s)
        .def_readonly("formants", &FormantFrame::formants);
    py::class_<FormantTrack>(m, "FormantTrack")
        .def_readonly("frames", &FormantTrack::frames)
        .def_readonly("voicing_onset_s", &FormantTrack::voicing_onset_s)
        .def_readonly("reliable", &FormantTrack::reliable);
    py::class_<F0Frame>(m, "F0Frame")
        .def_readonly("time_s", &F0Frame::time_s)
        .def_readonly("f0_hz", &F0Frame::f0_hz)
        .def_readonly("strength", &F0Frame::strength);
    py::class_<F0Track>(m, "F0Track")
        .def_readonly("frames", &F0Track::frames)
        .def("mean_voiced", &F0Track::mean_voiced);
    m.def("track_formants", &track_formants, py::arg("waveform"),
          py::arg("settings") = AnalysisSettings{});
    m.def("find_voicing_onset", &find_voicing_onset, py::arg("waveform"));
    m.def("track_f0", &track_f0, py::arg("waveform"),
          py::arg("settings") = AnalysisSettings{});
    m.def("measure_at_tenth_period", &measure_at_tenth_period, py::arg("track"),
          py::arg("f0_track"), py::arg("token_duration_s"));
    m.def("measure_token", &measure_token, py::arg("waveform"),
          py::arg("settings") = AnalysisSettings{});

    // resynthesis
    py::class_<ResynthesisPlan>(m, "ResynthesisPlan")
        .def(py::init<>())
        .def_readwrite("lpc_order", &ResynthesisPlan::lpc_order)
        .def_readwrite("window_s", &ResynthesisPlan::window_s)
        .def_readwrite("time_step_s", &ResynthesisPlan::time_step_s)
        .def_readwrite("f1_step_hz", &ResynthesisPlan::f1_step_hz)
        .def_readwrite("f2_step_hz", &ResynthesisPlan::f2_step_hz)
        .def_readwrite("index_min", &ResynthesisPlan::index_min)
        .def_readwrite("index_max", &ResynthesisPlan::index_max)
        .def_readwrite("base_token", &ResynthesisPlan::base_token)
        .def_readonly("base_measured", &ResynthesisPlan::base_measured);
    m.def("plan_resynthesis", &plan_resynthesis, py::arg("hid_tokens"),
          py::arg("head_tokens"), py::arg("steps_between") = 10,
          py::arg("index_min") = -1, py::arg("index_max") = 12,
          py::arg("analysis") = AnalysisSettings{});
    m.def("resynthesize_series", &resynthesize_series, py::arg("plan"));
    m.def("verify_series_roundtrip", &verify_series_roundtrip, py::arg("series"),
          py::arg("settings") = AnalysisSettings{});

    // simulation
    py::class_<ContinuumAxis>(m, "ContinuumAxis")
        .def_static("from_continuum", &ContinuumAxis::from_continuum)
        .def_static("from_endpoints", &ContinuumAxis::from_endpoints, py::arg("first"),
                    py::arg("last"), py::arg("n_stimuli"), py::arg("first_id") = 1.0)
        .def("coordinate", &ContinuumAxis::coordinate)
        .def("point_at", &ContinuumAxis::point_at)
        .def_readonly("dir_f1_mel", &ContinuumAxis::dir_f1_mel)
        .def_readonly("dir_f2_mel", &ContinuumAxis::dir_f2_mel)
        .def_readonly("step_mels", &ContinuumAxis::step_mels);
    py::class_<SubjectProfile>(m, "SubjectProfile")
        .def(py::init<>())
        .def_readwrite("id", &SubjectProfile::id)
        .def_readwrite("boundary_stim", &SubjectProfile::boundary_stim)
        .def_readwrite("warp_strength", &SubjectProfile::warp_strength)
        .def_readwrite("category_weight", &SubjectProfile::category_weight)
        .def_readwrite("prototypes", &SubjectProfile::prototypes)
        .def_readwrite("noise_sd_f1_hz", &SubjectProfile::noise_sd_f1_hz)
        .def_readwrite("noise_sd_f2_hz", &SubjectProfile::noise_sd_f2_hz)
        .def_readwrite("categorization_slope", &SubjectProfile::categorization_slope)
        .def_readwrite("seed", &SubjectProfile::seed)
        .def_property(
            "axis", [](const SubjectProfile& p) { return p.axis; },
            [](SubjectProfile& p, const ContinuumAxis& axis) {
                p.axis = axis;
                p.axis_set = true;
            });
    py::class_<MimicryResponse>(m, "MimicryResponse")
        .def(py::init<>())
        .def_readwrite("subject", &MimicryResponse::subject)
        .def_readwrite("stimulus_id", &MimicryResponse::stimulus_id)
        .def_readwrite("repetition", &MimicryResponse::repetition)
        .def_readwrite("trial_index", &MimicryResponse::trial_index)
        .def_readwrite("produced", &MimicryResponse::produced);
    m.def("respond", &respond, py::arg("profile"), py::arg("stimulus"),
          py::arg("stimulus_id"), py::arg("repetition"));
    m.def("run_block", &run_block, py::arg("profile"), py::arg("continuum"),
          py::arg("reps"));
    py::class_<CategorizationResult>(m, "CategorizationResult")
        .def_readonly("label", &CategorizationResult::label)
        .def_readonly("p_high", &CategorizationResult::p_high);
    m.def("categorize", &categorize, py::arg("profile"), py::arg("stimulus_coord"),
          py::arg("repetition") = 0);

    // psychometrics
    py::class_<DifferenceRule>(m, "DifferenceRule")
        .def(py::init<>())
        .def_readwrite("f1_threshold_hz", &DifferenceRule::f1_threshold_hz)
        .def_readwrite("f2_threshold_hz", &DifferenceRule::f2_threshold_hz)
        .def_readwrite("directional", &DifferenceRule::directional);
    m.def("classify_pair",
          py::overload_cast<const MimicryResponse&, const MimicryResponse&,
                            const DifferenceRule&>(&classify_pair),
          py::arg("reference"), py::arg("comparison"), py::arg("rule"));
    py::class_<DifferenceCell>(m, "DifferenceCell")
        .def_readonly("n_pairs", &DifferenceCell::n_pairs)
        .def_readonly("n_different", &DifferenceCell::n_different)
        .def_readonly("distance_mels", &DifferenceCell::distance_mels);
    py::class_<DifferenceTable>(m, "DifferenceTable")
        .def(py::init<>())
        .def_readonly("cells", &DifferenceTable::cells)
        .def("reference_ids", &DifferenceTable::reference_ids);
    m.def("tabulate", &tabulate, py::arg("responses"), py::arg("continuum"),
          py::arg("rule"));
    py::class_<ProbitFit>(m, "ProbitFit")
        .def_readonly("alpha", &ProbitFit::alpha)
        .def_readonly("beta", &ProbitFit::beta)
        .def_readonly("floor_c", &ProbitFit::floor_c)
        .def_readonly("converged", &ProbitFit::converged)
        .def_readonly("non_monotone", &ProbitFit::non_monotone)
        .def_readonly("log_likelihood", &ProbitFit::log_likelihood)
        .def_readonly("n_iterations", &ProbitFit::n_iterations);
    py::class_<JpdEstimate>(m, "JpdEstimate")
        .def_readonly("reference_stim", &JpdEstimate::reference_stim)
        .def_readonly("x50_mels", &JpdEstimate::x50_mels)
        .def_readonly("inverse_steepness_mels", &JpdEstimate::inverse_steepness_mels)
        .def_readonly("fit", &JpdEstimate::fit)
        .def_readonly("n_pairs", &JpdEstimate::n_pairs);
    py::class_<BinomialPoint>(m, "BinomialPoint")
        .def(py::init([](double x, double k, double n) {
                 return BinomialPoint{x, k, n};
             }),
             py::arg("x"), py::arg("k"), py::arg("n"))
        .def_readwrite("x", &BinomialPoint::x)
        .def_readwrite("k", &BinomialPoint::k)
        .def_readwrite("n", &BinomialPoint::n);
    m.def("fit_probit_floor", &fit_probit_floor, py::arg("points"), py::arg("floor_c"));
    m.def("fit_probit_floor_free", &fit_probit_floor_free, py::arg("points"));
    m.def("fit_jpd", &fit_jpd, py::arg("table"), py::arg("reference_stim"),
          py::arg("floor_c") = 0.1, py::arg("estimate_floor") = false);
    m.def("grid_oracle_fit", &grid_oracle_fit, py::arg("table"),
          py::arg("reference_stim"), py::arg("floor_c") = 0.1);
    py::class_<CategorizationFit>(m, "CategorizationFit")
        .def_readonly("boundary_stim", &CategorizationFit::boundary_stim)
        .def_readonly("alpha", &CategorizationFit::alpha)
        .def_readonly("beta", &CategorizationFit::beta)
        .def_readonly("converged", &CategorizationFit::converged)
        .def_readonly("separated", &CategorizationFit::separated);
    m.def("fit_categorization", &fit_categorization, py::arg("label_counts"));
    m.def("same_stimulus_difference_probability", &same_stimulus_difference_probability,
          py::arg("sd_f1_hz"), py::arg("sd_f2_hz"), py::arg("rule") = DifferenceRule{});

    // staircase
    py::class_<StaircaseOptions>(m, "StaircaseOptions")
        .def(py::init<>())
        .def_readwrite("target_p", &StaircaseOptions::target_p)
        .def_readwrite("initial_distance_mels", &StaircaseOptions::initial_distance_mels)
        .def_readwrite("initial_step_mels", &StaircaseOptions::initial_step_mels)
        .def_readwrite("reversals", &StaircaseOptions::reversals)
        .def_readwrite("max_trials", &StaircaseOptions::max_trials)
        .def_readwrite("seed", &StaircaseOptions::seed);
    py::class_<StaircaseResult>(m, "StaircaseResult")
        .def_readonly("distance_mels", &StaircaseResult::distance_mels)
        .def_readonly("n_trials", &StaircaseResult::n_trials)
        .def_readonly("n_reversals", &StaircaseResult::n_reversals)
        .def_readonly("converged", &StaircaseResult::converged);
    m.def("adaptive_step_search", &adaptive_step_search, py::arg("profile"),
          py::arg("reference"), py::arg("dir_f1_mel"), py::arg("dir_f2_mel"),
          py::arg("rule") = DifferenceRule{}, py::arg("options") = StaircaseOptions{});

    // pipeline
    m.def("load_config", &load_config, py::arg("path"));
    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init<>())
        .def_readwrite("seed", &ExperimentConfig::seed)
        .def_readwrite("reps", &ExperimentConfig::reps)
        .def_readwrite("subjects", &ExperimentConfig::subjects)
        .def_readwrite("rule", &ExperimentConfig::rule);
    py::class_<JpdSummary>(m, "JpdSummary")
        .def_readonly("upper_bound_mels", &JpdSummary::upper_bound_mels)
        .def_readonly("lower_bound_mels", &JpdSummary::lower_bound_mels)
        .def_readonly("upper_reference", &JpdSummary::upper_reference)
        .def_readonly("lower_reference", &JpdSummary::lower_reference)
        .def_readonly("estimates", &JpdSummary::estimates)
        .def_readonly("fit_exceptions", &JpdSummary::fit_exceptions);
    py::class_<RunReport>(m, "RunReport")
        .def_readonly("out_dir", &RunReport::out_dir)
        .def_readonly("stage_outputs", &RunReport::stage_outputs)
        .def_readonly("jpd", &RunReport::jpd)
        .def_readonly("version", &RunReport::version);
    m.def("run_pipeline", &run_pipeline, py::arg("config"), py::arg("out_dir"),
          py::call_guard<py::gil_scoped_release>());
}
