"""Programmatic definition of the bundled synthetic suite.

Six scripted consultations with gold events, boundaries, goals, risks,
observation models, and qrels over a shared desk-scale corpus. The suite
ships as JSON under consultkit/data/suite; regeneration is byte-stable so
a test can hold the shipped files and this module in lockstep.

Authoring rules the scripts follow (the boundary and extraction layers
depend on them):
  - boundary cue words (well/so/now/also/okay, terminal "thanks") appear
    only sentence-initially / sentence-finally;
  - negation cues appear within four tokens of a surface only when the
    negation is intended, except in the deliberate cross-sentence traps;
  - sentence gaps are styled long / cue / dip so the four punctuation
    settings recover strictly growing boundary sets.
"""

from __future__ import annotations

import json
from pathlib import Path

from ..stream import ScriptedDialogue, gold_boundaries_for_script
from .config import DEFAULT_CONFIG

# --- shared schema ---

_FIELDS = [
    # (field_id, kind, value_domain, required_for_goal)
    ("chest_tightness", "symptom", ["present"], True),
    ("chest_wall_tenderness", "symptom", ["present"], False),
    ("shortness_of_breath", "symptom", ["present"], False),
    ("fever", "symptom", ["present"], False),
    ("cough", "symptom", ["present"], True),
    ("wheeze", "symptom", ["present"], False),
    ("headache", "symptom", ["present"], True),
    ("nausea", "symptom", ["present"], False),
    ("heartburn", "symptom", ["present"], False),
    ("sour_taste", "symptom", ["present"], False),
    ("abdominal_pain", "symptom", ["present"], True),
    ("joint_pain", "symptom", ["present"], True),
    ("joint_swelling", "symptom", ["present"], False),
    ("dizziness", "symptom", ["present"], True),
    ("light_sensitivity", "symptom", ["present"], False),
    ("aura", "symptom", ["present"], False),
    ("pallor", "symptom", ["present"], False),
    ("fatigue", "symptom", ["present"], False),
    ("onset", "onset", ["yesterday", "this_morning", "last_week", "two_days_ago",
                        "last_night", "a_month_ago"], True),
    ("location", "location", ["left_side", "center_chest", "right_upper_belly", "upper_belly",
                              "temples", "one_side", "knees", "big_toe"], True),
    ("severity", "severity", ["mild", "moderate", "severe"], True),
    ("exertional_worsening", "modifier", ["present"], False),
    ("rest_relief", "modifier", ["present"], False),
    ("postprandial_worsening", "modifier", ["present"], False),
    ("oily_food_trigger", "modifier", ["present"], False),
    ("night_worsening", "modifier", ["present"], False),
    ("radiation_left_arm", "modifier", ["present"], False),
    ("movement_worsening", "modifier", ["present"], False),
    ("morning_stiffness", "modifier", ["present"], False),
    ("screen_time_trigger", "modifier", ["present"], False),
    ("eating_relief", "modifier", ["present"], False),
    ("exam_ecg", "exam", ["st_depression", "normal"], False),
    ("exam_ultrasound", "exam", ["gallstones", "normal"], False),
    ("exam_xray", "exam", ["infiltrate", "clear"], False),
    ("exam_spirometry", "exam", ["obstruction", "normal"], False),
    ("exam_joint_fluid", "exam", ["crystals", "normal"], False),
    ("exam_blood_count", "exam", ["low_hemoglobin", "normal"], False),
    ("exam_diary", "exam", ["migraine_pattern", "tension_pattern"], False),
    ("smoking_history", "history", ["present"], False),
    ("hypertension_history", "history", ["present"], False),
    ("family_heart_history", "history", ["present"], False),
    ("prior_ulcer_history", "history", ["present"], False),
    ("daily_painkillers", "history", ["present"], False),
    ("alcohol_use", "history", ["present"], False),
    ("fainting", "risk_flag", ["present"], False),
    ("blood_in_stool", "risk_flag", ["present"], False),
    ("weight_loss", "risk_flag", ["present"], False),
]

_SYNONYMS = {
    "tight": ["chest_tightness", "present"],
    "tightness": ["chest_tightness", "present"],
    "pressure": ["chest_tightness", "present"],
    "tender": ["chest_wall_tenderness", "present"],
    "breathless": ["shortness_of_breath", "present"],
    "short of breath": ["shortness_of_breath", "present"],
    "winded": ["shortness_of_breath", "present"],
    "fever": ["fever", "present"],
    "feverish": ["fever", "present"],
    "cough": ["cough", "present"],
    "coughing": ["cough", "present"],
    "wheeze": ["wheeze", "present"],
    "wheezing": ["wheeze", "present"],
    "headache": ["headache", "present"],
    "headaches": ["headache", "present"],
    "nausea": ["nausea", "present"],
    "nauseous": ["nausea", "present"],
    "queasy": ["nausea", "present"],
    "heartburn": ["heartburn", "present"],
    "burning": ["heartburn", "present"],
    "sour taste": ["sour_taste", "present"],
    "stomach hurts": ["abdominal_pain", "present"],
    "stomach ache": ["abdominal_pain", "present"],
    "belly pain": ["abdominal_pain", "present"],
    "joint pain": ["joint_pain", "present"],
    "joints ache": ["joint_pain", "present"],
    "swollen": ["joint_swelling", "present"],
    "swelling": ["joint_swelling", "present"],
    "dizzy": ["dizziness", "present"],
    "dizziness": ["dizziness", "present"],
    "lightheaded": ["dizziness", "present"],
    "light hurts": ["light_sensitivity", "present"],
    "lights bother": ["light_sensitivity", "present"],
    "zigzag": ["aura", "present"],
    "aura": ["aura", "present"],
    "pale": ["pallor", "present"],
    "tired": ["fatigue", "present"],
    "yesterday": ["onset", "yesterday"],
    "this morning": ["onset", "this_morning"],
    "last week": ["onset", "last_week"],
    "two days ago": ["onset", "two_days_ago"],
    "last night": ["onset", "last_night"],
    "a month ago": ["onset", "a_month_ago"],
    "left side": ["location", "left_side"],
    "breastbone": ["location", "center_chest"],
    "right ribs": ["location", "right_upper_belly"],
    "upper belly": ["location", "upper_belly"],
    "temples": ["location", "temples"],
    "one side": ["location", "one_side"],
    "knees": ["location", "knees"],
    "big toe": ["location", "big_toe"],
    "mild": ["severity", "mild"],
    "moderate": ["severity", "moderate"],
    "severe": ["severity", "severe"],
    "climbing stairs": ["exertional_worsening", "present"],
    "exertion": ["exertional_worsening", "present"],
    "exercise": ["exertional_worsening", "present"],
    "better after sitting": ["rest_relief", "present"],
    "settles with rest": ["rest_relief", "present"],
    "eases with rest": ["rest_relief", "present"],
    "after meals": ["postprandial_worsening", "present"],
    "flares after eating": ["postprandial_worsening", "present"],
    "oily": ["oily_food_trigger", "present"],
    "fried": ["oily_food_trigger", "present"],
    "greasy": ["oily_food_trigger", "present"],
    "at night": ["night_worsening", "present"],
    "lying down": ["night_worsening", "present"],
    "left shoulder": ["radiation_left_arm", "present"],
    "left arm": ["radiation_left_arm", "present"],
    "movement": ["movement_worsening", "present"],
    "twisting": ["movement_worsening", "present"],
    "morning stiffness": ["morning_stiffness", "present"],
    "screens": ["screen_time_trigger", "present"],
    "screen time": ["screen_time_trigger", "present"],
    "better after eating": ["eating_relief", "present"],
    "st depression": ["exam_ecg", "st_depression"],
    "gallstones": ["exam_ultrasound", "gallstones"],
    "infiltrate": ["exam_xray", "infiltrate"],
    "obstruction": ["exam_spirometry", "obstruction"],
    "crystals": ["exam_joint_fluid", "crystals"],
    "low hemoglobin": ["exam_blood_count", "low_hemoglobin"],
    "migraine pattern": ["exam_diary", "migraine_pattern"],
    "smoke": ["smoking_history", "present"],
    "smoker": ["smoking_history", "present"],
    "blood pressure": ["hypertension_history", "present"],
    "heart attack": ["family_heart_history", "present"],
    "heart trouble": ["family_heart_history", "present"],
    "ulcer": ["prior_ulcer_history", "present"],
    "painkillers": ["daily_painkillers", "present"],
    "ibuprofen": ["daily_painkillers", "present"],
    "beer": ["alcohol_use", "present"],
    "wine": ["alcohol_use", "present"],
    "alcohol": ["alcohol_use", "present"],
    "fainted": ["fainting", "present"],
    "passed out": ["fainting", "present"],
    "blacked out": ["fainting", "present"],
    "dark stools": ["blood_in_stool", "present"],
    "blood in my stool": ["blood_in_stool", "present"],
    "losing weight": ["weight_loss", "present"],
    "weight loss": ["weight_loss", "present"],
    "lost weight": ["weight_loss", "present"],
}

_NEGATION_CUES = ["no", "not", "denies", "without", "never", "none", "haven't", "hasn't"]

_TEMPORAL_CUES = {
    "yesterday": "since_yesterday",
    "this morning": "since_this_morning",
    "last week": "since_last_week",
    "two days ago": "for_two_days",
    "last night": "since_last_night",
    "a month ago": "for_a_month",
    "lately": "recently",
}

_LEXICON = {
    "initial_cues": [["also", 1.0], ["now", 1.0], ["okay", 1.0], ["so", 1.0], ["well", 1.0]],
    "terminal_cues": [["thanks", 1.0]],
    "interrogatives": ["did", "do", "does", "how", "what", "when", "where"],
}


def build_schema() -> dict:
    return {
        "fields": [
            {"field_id": f, "kind": k, "value_domain": vd, "required_for_goal": req}
            for f, k, vd, req in _FIELDS
        ],
        "synonym_map": _SYNONYMS,
        "negation_cues": _NEGATION_CUES,
        "temporal_cues": _TEMPORAL_CUES,
        "negation_window": 4,
    }


# --- shared corpus ---

def _block(doc, page, block, kind, text, tags=(), edges=()):
    return {"document_id": doc, "page_no": page, "block_id": block, "text": text,
            "kind_hint": kind, "tags": list(tags), "edges": [list(e) for e in edges]}


def build_corpus() -> list[dict]:
    B = _block
    return [
        # cardiology
        B("cardio_handbook", 1, "dx_cardiac", "diagnosis_unit",
          "exertional chest tightness with pressure that spreads to the left shoulder or "
          "left arm and settles with rest points to cardiac ischemia",
          tags=["hyp:cardiac_ischemia"],
          edges=[("supported_by", "cardio_handbook/sym_exertional"),
                 ("supported_by", "cardio_handbook/sym_radiation"),
                 ("confirmed_by", "exam_catalog/ecg"),
                 ("raises", "risk_rules/ischemia_rule")]),
        B("cardio_handbook", 1, "sym_exertional", "symptom_unit",
          "chest tightness with exertional worsening such as climbing stairs that settles "
          "with rest relief",
          edges=[("suggests", "cardio_handbook/dx_cardiac")]),
        B("cardio_handbook", 2, "sym_radiation", "symptom_unit",
          "pressure or ache spreading to the left shoulder or left arm during chest episodes",
          edges=[("suggests", "cardio_handbook/dx_cardiac")]),
        B("chestwall_notes", 1, "dx_strain", "diagnosis_unit",
          "chest wall strain causes soreness that is tender to touch and worse with "
          "movement or twisting",
          tags=["hyp:musculoskeletal_strain"],
          edges=[("supported_by", "chestwall_notes/sym_tender")]),
        B("chestwall_notes", 1, "sym_tender", "symptom_unit",
          "chest wall tenderness reproduced by pressing with movement worsening",
          edges=[("suggests", "chestwall_notes/dx_strain")]),
        # gastro
        B("gi_handbook", 1, "dx_reflux", "diagnosis_unit",
          "heartburn burning behind the breastbone with a sour taste after meals and worse "
          "lying down points to reflux esophagitis",
          tags=["hyp:reflux_esophagitis"],
          edges=[("supported_by", "gi_handbook/sym_heartburn")]),
        B("gi_handbook", 1, "sym_heartburn", "symptom_unit",
          "burning that rises behind the breastbone with a sour taste after meals",
          edges=[("suggests", "gi_handbook/dx_reflux")]),
        B("gi_handbook", 2, "dx_biliary", "diagnosis_unit",
          "right upper belly pain after oily or fried food with nausea points to gallstones "
          "and biliary colic",
          tags=["hyp:biliary_colic"],
          edges=[("supported_by", "gi_handbook/sym_oily"),
                 ("confirmed_by", "exam_catalog/ultrasound")]),
        B("gi_handbook", 2, "sym_oily", "symptom_unit",
          "cramping under the right ribs with an oily food trigger and postprandial "
          "worsening with nausea",
          edges=[("suggests", "gi_handbook/dx_biliary")]),
        B("gi_handbook", 3, "dx_ulcer", "diagnosis_unit",
          "gnawing upper belly pain with dark stools weight loss or prior ulcer history "
          "points to peptic ulcer disease",
          tags=["hyp:peptic_ulcer"],
          edges=[("raises", "risk_rules/gi_bleed_rule")]),
        # respiratory
        B("resp_handbook", 1, "dx_infection", "diagnosis_unit",
          "fever with a productive cough and a one side chest ache points to a chest infection",
          tags=["hyp:chest_infection"],
          edges=[("supported_by", "resp_handbook/sym_productive"),
                 ("confirmed_by", "exam_catalog/chest_xray"),
                 ("raises", "risk_rules/pneumonia_rule")]),
        B("resp_handbook", 1, "sym_productive", "symptom_unit",
          "cough with fever bringing up green phlegm with a one side location",
          edges=[("suggests", "resp_handbook/dx_infection")]),
        B("resp_handbook", 2, "dx_asthma", "diagnosis_unit",
          "wheeze with night worsening cough that responds to an inhaler points to an asthma flare",
          tags=["hyp:asthma_flare"],
          edges=[("supported_by", "resp_handbook/sym_wheeze"),
                 ("confirmed_by", "exam_catalog/spirometry")]),
        B("resp_handbook", 2, "sym_wheeze", "symptom_unit",
          "whistling wheeze with night worsening and a dry tickle",
          edges=[("suggests", "resp_handbook/dx_asthma")]),
        B("resp_handbook", 3, "dx_postviral", "diagnosis_unit",
          "a lingering dry cough after a recent cold with no fever points to a post viral cough",
          tags=["hyp:post_viral_cough"]),
        # neurology
        B("neuro_handbook", 1, "dx_migraine", "diagnosis_unit",
          "one side throbbing headache with nausea light sensitivity and aura points to migraine",
          tags=["hyp:migraine"],
          edges=[("supported_by", "neuro_handbook/sym_throbbing"),
                 ("confirmed_by", "exam_catalog/headache_diary")]),
        B("neuro_handbook", 1, "sym_throbbing", "symptom_unit",
          "headache that throbs on one side with nausea and light sensitivity",
          edges=[("suggests", "neuro_handbook/dx_migraine")]),
        B("neuro_handbook", 2, "dx_tension", "diagnosis_unit",
          "a band of pressing tightness at the temples tied to screen time and stress "
          "points to tension headache",
          tags=["hyp:tension_headache"]),
        B("neuro_handbook", 2, "dx_overuse", "diagnosis_unit",
          "daily painkillers with rebound headache on most days points to medication "
          "overuse headache",
          tags=["hyp:medication_overuse"],
          edges=[("raises", "risk_rules/overuse_rule"),
                 ("confirmed_by", "exam_catalog/headache_diary")]),
        # joints
        B("joint_handbook", 1, "dx_gout", "diagnosis_unit",
          "sudden hot red big toe joint pain at night often after wine or a rich dinner "
          "points to a gout flare",
          tags=["hyp:gout_flare"],
          edges=[("supported_by", "joint_handbook/sym_toe"),
                 ("confirmed_by", "exam_catalog/joint_fluid")]),
        B("joint_handbook", 1, "sym_toe", "symptom_unit",
          "a hot red swollen big toe joint with severe joint pain of sudden onset",
          edges=[("suggests", "joint_handbook/dx_gout")]),
        B("joint_handbook", 2, "dx_oa", "diagnosis_unit",
          "knee joint pain worse with activity and better with rest in older adults points "
          "to osteoarthritis",
          tags=["hyp:osteoarthritis"]),
        B("joint_handbook", 2, "dx_inflam", "diagnosis_unit",
          "morning stiffness over an hour with swollen warm joints on both sides points to "
          "inflammatory arthritis",
          tags=["hyp:inflammatory_arthritis"],
          edges=[("raises", "risk_rules/septic_rule")]),
        # blood and balance
        B("blood_handbook", 1, "dx_anemia", "diagnosis_unit",
          "dizziness with pallor fatigue and shortness of breath on effort points to anemia "
          "from low hemoglobin",
          tags=["hyp:anemia"],
          edges=[("supported_by", "blood_handbook/sym_pallor"),
                 ("confirmed_by", "exam_catalog/blood_count")]),
        B("blood_handbook", 1, "sym_pallor", "symptom_unit",
          "pale skin with tiredness and dizziness on effort",
          edges=[("suggests", "blood_handbook/dx_anemia")]),
        B("balance_notes", 1, "dx_bppv", "diagnosis_unit",
          "brief spinning triggered by rolling over in bed lasting seconds points to "
          "positional vertigo",
          tags=["hyp:bppv"]),
        B("balance_notes", 1, "dx_orthostatic", "diagnosis_unit",
          "faint or dizzy moments right after standing up quickly point to a blood pressure "
          "drop on standing",
          tags=["hyp:orthostatic"],
          edges=[("raises", "risk_rules/fainting_rule")]),
        # exams: confirmatory units are lexically quiet about the state
        # vocabulary so graph proximity, not keyword overlap, surfaces them.
        B("exam_catalog", 1, "ecg", "exam_unit",
          "a resting heart tracing looks for st depression during effort related episodes",
          edges=[("confirms", "cardio_handbook/dx_cardiac"),
                 ("closes", "risk_rules/ischemia_rule")]),
        B("exam_catalog", 1, "chest_panel", "exam_unit",
          "general chest panel reviews chest tightness onset location severity exertional "
          "worsening rest relief and related chest complaints"),
        B("exam_catalog", 1, "vitals", "exam_unit",
          "routine vitals sheet records pulse temperature and blood pressure for any complaint"),
        B("exam_catalog", 2, "ultrasound", "exam_unit",
          "an ultrasound of the gallbladder finds gallstones when fatty meals bring cramps "
          "and queasiness",
          edges=[("confirms", "gi_handbook/dx_biliary")]),
        B("exam_catalog", 2, "belly_panel", "exam_unit",
          "upper belly panel reviews abdominal pain onset location severity oily food "
          "trigger postprandial worsening and nausea"),
        B("exam_catalog", 3, "chest_xray", "exam_unit",
          "an xray film of the lungs shows an infiltrate when a damp hack and high "
          "temperature persist",
          edges=[("confirms", "resp_handbook/dx_infection"),
                 ("closes", "risk_rules/pneumonia_rule")]),
        B("exam_catalog", 3, "spirometry", "exam_unit",
          "a breathing flow test grades airway narrowing behind whistling episodes",
          edges=[("confirms", "resp_handbook/dx_asthma")]),
        B("exam_catalog", 3, "cough_panel", "exam_unit",
          "cough panel reviews cough onset severity fever night worsening and shortness of breath"),
        B("exam_catalog", 4, "headache_diary", "exam_unit",
          "a two week structured diary maps aura days light triggers and tablet timing",
          edges=[("confirms", "neuro_handbook/dx_migraine"),
                 ("confirms", "neuro_handbook/dx_overuse")]),
        B("exam_catalog", 4, "headache_panel", "exam_unit",
          "headache panel reviews headache onset location severity light sensitivity and "
          "painkiller use"),
        B("exam_catalog", 5, "joint_fluid", "exam_unit",
          "fluid drawn from the flare site shows urate crystals under the scope",
          edges=[("confirms", "joint_handbook/dx_gout"),
                 ("closes", "risk_rules/septic_rule")]),
        B("exam_catalog", 5, "joint_panel", "exam_unit",
          "joint panel reviews joint pain onset location severity joint swelling and "
          "morning stiffness"),
        B("exam_catalog", 6, "blood_count", "exam_unit",
          "a lab count of red cells measures hemoglobin behind pallor fatigue and fainting spells",
          edges=[("confirms", "blood_handbook/dx_anemia")]),
        B("exam_catalog", 6, "dizzy_panel", "exam_unit",
          "dizziness panel reviews the spells onset severity and fainting episodes"),
        # risk rules
        B("risk_rules", 1, "ischemia_rule", "risk_rule_unit",
          "st depression on a heart tracing with exertional chest tightness needs urgent "
          "cardiology review",
          edges=[("closed_by", "exam_catalog/ecg")]),
        B("risk_rules", 1, "gi_bleed_rule", "risk_rule_unit",
          "blood in the stool or dark stools with weight loss need urgent checks for "
          "stomach bleeding",
          edges=[("relates", "gi_handbook/dx_ulcer")]),
        B("risk_rules", 1, "pneumonia_rule", "risk_rule_unit",
          "fever with a productive cough needs a same week lung film",
          edges=[("closed_by", "exam_catalog/chest_xray")]),
        B("risk_rules", 2, "overuse_rule", "risk_rule_unit",
          "painkillers on most days with rebound headache need a structured taper plan",
          edges=[("relates", "neuro_handbook/dx_overuse")]),
        B("risk_rules", 2, "septic_rule", "risk_rule_unit",
          "a hot joint with fever needs urgent fluid checks",
          edges=[("closed_by", "exam_catalog/joint_fluid")]),
        B("risk_rules", 2, "fainting_rule", "risk_rule_unit",
          "fainting or blacking out needs same day checks and a standing blood pressure measure",
          edges=[("relates", "balance_notes/dx_orthostatic")]),
        # case summaries
        B("case_library", 1, "chest_case_note", "case_summary",
          "case summary exertional chest tightness with left shoulder ache improved at rest "
          "referred for a heart tracing"),
        B("case_library", 1, "belly_case_note", "case_summary",
          "case summary right upper belly pain after fried food with nausea confirmed "
          "gallstones on gallbladder ultrasound"),
        B("case_library", 1, "cough_case_note", "case_summary",
          "case summary fever and productive cough with one side ache infiltrate on the "
          "lung film treated as chest infection"),
    ]


# --- observation model helpers ---

def _model(hyp_ids, answers):
    """answers: {answer_id: (text, {hyp: prob})}; fills omitted hyps with 0."""
    return {
        "answers": {
            aid: {"text": text,
                  "likelihood": {h: float(probs.get(h, 0.0)) for h in hyp_ids}}
            for aid, (text, probs) in answers.items()
        }
    }


def _ack(hyp_ids, text):
    return _model(hyp_ids, {"ack": (text, {h: 1.0 for h in hyp_ids})})


def _ev(field_id, value, polarity, turn, temporal=None):
    return {"field_id": field_id, "value": value, "polarity": polarity,
            "source_turn": turn, "temporal": temporal}


# --- cases ---

def case_chest() -> dict:
    hyp = ["cardiac_ischemia", "musculoskeletal_strain", "reflux_esophagitis"]
    script = {
        "case_id": "chest_pain_01",
        "turns": [
            {"role": "doctor", "text": "what brings you in today?"},
            {"role": "patient",
             "text": "started yesterday. chest feels tight. worse when climbing stairs. "
                     "gets a little better after sitting. left shoulder sometimes sore.",
             "boundary_styles": ["long", "long", "dip", "long"]},
            {"role": "doctor", "text": "does it spread anywhere else?"},
            {"role": "patient",
             "text": "it stays around the same spot mostly. okay maybe it is more of a "
                     "pressure. also no fever. the tightness comes in waves.",
             "boundary_styles": ["cue", "cue", "dip"]},
            {"role": "doctor", "text": "what should i know about your history?"},
            {"role": "patient",
             "text": "i smoke a pack a day. my father had a heart attack at sixty. no blood "
                     "pressure problems myself.",
             "boundary_styles": ["long", "long"]},
            {"role": "patient",
             "text": "honestly the climbing is the worst part. i nearly fainted on the "
                     "stairs earlier.",
             "boundary_styles": ["long"]},
            {"role": "doctor", "text": "alright thanks. we will sort out the checks right away.",
             "boundary_styles": ["cue"]},
        ],
    }
    gold_events = [
        _ev("onset", "yesterday", "asserted", 2, "since_yesterday"),
        _ev("chest_tightness", "present", "asserted", 2),
        _ev("exertional_worsening", "present", "asserted", 2),
        _ev("rest_relief", "present", "asserted", 2),
        _ev("radiation_left_arm", "present", "asserted", 2),
        _ev("chest_tightness", "present", "asserted", 4),
        _ev("fever", "present", "negated", 4),
        _ev("chest_tightness", "present", "asserted", 4),
        _ev("smoking_history", "present", "asserted", 6),
        _ev("family_heart_history", "present", "asserted", 6),
        _ev("hypertension_history", "present", "negated", 6),
        _ev("fainting", "present", "asserted", 7),
    ]
    models = {
        "ask:severity": _model(hyp, {
            "moderate": ("it feels moderate most of the time.",
                         {"cardiac_ischemia": 1.0, "musculoskeletal_strain": 0.3,
                          "reflux_esophagitis": 0.5}),
            "mild": ("pretty mild honestly.",
                     {"musculoskeletal_strain": 0.7, "reflux_esophagitis": 0.5}),
        }),
        "ask:location": _model(hyp, {
            "left": ("mostly on the left side of my chest.",
                     {"cardiac_ischemia": 1.0, "musculoskeletal_strain": 0.4}),
            "center": ("more in the center behind the breastbone.",
                       {"musculoskeletal_strain": 0.6, "reflux_esophagitis": 1.0}),
        }),
        "ask:chest_tightness": _ack(hyp, "yes there is a tight feeling in my chest."),
        "ask:onset": _ack(hyp, "it started yesterday."),
        "verify:cardiac_ischemia": _model(hyp, {
            "yes": ("yes the pressure builds when climbing stairs and settles with rest.",
                    {"cardiac_ischemia": 1.0, "musculoskeletal_strain": 0.25,
                     "reflux_esophagitis": 0.2}),
            "no": ("it does not seem tied to effort that clearly.",
                   {"musculoskeletal_strain": 0.75, "reflux_esophagitis": 0.8}),
        }),
        "verify:musculoskeletal_strain": _model(hyp, {
            "yes": ("it is worse with twisting and the spot aches.",
                    {"musculoskeletal_strain": 0.85, "reflux_esophagitis": 0.1}),
            "no": ("it is not tender to the touch at all.",
                   {"cardiac_ischemia": 1.0, "musculoskeletal_strain": 0.15,
                    "reflux_esophagitis": 0.9}),
        }),
        "verify:reflux_esophagitis": _model(hyp, {
            "yes": ("there is burning and a sour taste after meals.",
                    {"musculoskeletal_strain": 0.1, "reflux_esophagitis": 0.95}),
            "no": ("no burning after meals and no sour taste.",
                   {"cardiac_ischemia": 1.0, "musculoskeletal_strain": 0.9,
                    "reflux_esophagitis": 0.05}),
        }),
        "recommend_exam:exam_catalog/ecg": _model(hyp, {
            "st_dep": ("the ecg tracing shows st depression during the tightness episode.",
                       {"cardiac_ischemia": 1.0, "musculoskeletal_strain": 0.02,
                        "reflux_esophagitis": 0.03}),
            "normal": ("the ecg tracing looks clean.",
                       {"musculoskeletal_strain": 0.98, "reflux_esophagitis": 0.97}),
        }),
        "recommend_exam:exam_catalog/chest_panel": _ack(hyp, "the panel summary is filed with the chart."),
        "recommend_exam:exam_catalog/vitals": _ack(hyp, "the vitals sheet is added to the chart."),
        "risk_close:r_exertional_pattern": _ack(hyp, "i will avoid heavy exertion until the tests are done."),
        "risk_close:r_fainting_flag": _ack(hyp, "the fainting lasted seconds and i recovered fully."),
        "risk_close:r_ischemic_ecg": _ack(hyp, "an urgent cardiology review is booked for the st depression finding."),
    }
    return {
        "case_id": "chest_pain_01",
        "true_hypothesis": "cardiac_ischemia",
        "hypotheses": {
            "ids": hyp,
            "names": ["cardiac ischemia", "chest wall strain", "reflux"],
            "keywords": {
                "cardiac_ischemia": ["tight", "tightness", "pressure", "climbing stairs",
                                     "exertion", "left shoulder", "left arm", "st depression"],
                "musculoskeletal_strain": ["tender", "twisting", "strain", "spot"],
                "reflux_esophagitis": ["burning", "heartburn", "sour", "meals", "lying down"],
            },
        },
        "rule_evidence": {
            "cardiac_ischemia": [
                ["chest_tightness", "asserted", None, 1.0],
                ["exertional_worsening", "asserted", None, 1.5],
                ["rest_relief", "asserted", None, 1.0],
                ["radiation_left_arm", "asserted", None, 1.0],
                ["exam_ecg", "asserted", "st_depression", 2.5],
                ["smoking_history", "asserted", None, 0.5],
                ["family_heart_history", "asserted", None, 0.5],
            ],
            "musculoskeletal_strain": [
                ["chest_wall_tenderness", "asserted", None, 2.0],
                ["movement_worsening", "asserted", None, 1.5],
            ],
            "reflux_esophagitis": [
                ["heartburn", "asserted", None, 2.0],
                ["postprandial_worsening", "asserted", None, 1.0],
                ["sour_taste", "asserted", None, 1.0],
                ["night_worsening", "asserted", None, 0.5],
            ],
        },
        "script": script,
        "goal": {
            "required_slots": ["chest_tightness", "onset", "severity", "location"],
            "confidence_floor": 0.45,
            "risk_checks": [
                {"risk_id": "r_exertional_pattern",
                 "trigger": [["chest_tightness", "asserted", None],
                             ["exertional_worsening", "asserted", None]]},
                {"risk_id": "r_fainting_flag",
                 "trigger": [["fainting", "asserted", None]]},
                {"risk_id": "r_ischemic_ecg",
                 "trigger": [["exam_ecg", "asserted", "st_depression"]]},
            ],
        },
        "gold_events": gold_events,
        "gold_information_items": [
            ["chest_tightness", "present", "asserted"],
            ["onset", "yesterday", "asserted"],
            ["exertional_worsening", "present", "asserted"],
            ["rest_relief", "present", "asserted"],
            ["radiation_left_arm", "present", "asserted"],
            ["fever", "present", "negated"],
            ["smoking_history", "present", "asserted"],
            ["family_heart_history", "present", "asserted"],
            ["hypertension_history", "present", "negated"],
            ["fainting", "present", "asserted"],
            ["severity", "moderate", "asserted"],
            ["location", "left_side", "asserted"],
            ["exam_ecg", "st_depression", "asserted"],
            ["heartburn", "present", "negated"],
        ],
        "gold_slot_values": {
            "chest_tightness": ["present", "asserted"],
            "onset": ["yesterday", "asserted"],
            "severity": ["moderate", "asserted"],
            "location": ["left_side", "asserted"],
        },
        "preferred_actions": {"default_kinds": ["ask", "verify", "recommend_exam", "risk_close"],
                              "conclude_when_goal_met": True},
        "observation_models": models,
        "query_ids": ["q_chest_01", "q_chest_02", "q_chest_03", "q_chest_04", "q_chest_05"],
    }


def case_abdomen() -> dict:
    hyp = ["biliary_colic", "peptic_ulcer", "reflux_esophagitis"]
    script = {
        "case_id": "abdominal_pain_02",
        "turns": [
            {"role": "doctor", "text": "what can i do for you today?"},
            {"role": "patient",
             "text": "my stomach hurts. it started last week. the pain sits under my right "
                     "ribs. oily food sets it off.",
             "boundary_styles": ["long", "long", "long"]},
            {"role": "doctor", "text": "how does it behave after food?"},
            {"role": "patient",
             "text": "it flares after meals. so fried snacks are the worst. no heartburn "
                     "though. the queasy feeling is constant.",
             "boundary_styles": ["cue", "long", "long"]},
            {"role": "doctor", "text": "did anything else change lately?"},
            {"role": "patient",
             "text": "i have been losing weight without trying. i noticed dark stools this "
                     "week too.",
             "boundary_styles": ["dip"]},
            {"role": "doctor", "text": "do you take anything regularly?"},
            {"role": "patient",
             "text": "a beer most evenings maybe. no painkillers at all.",
             "boundary_styles": ["long"]},
        ],
    }
    gold_events = [
        _ev("abdominal_pain", "present", "asserted", 2, "since_last_week"),
        _ev("onset", "last_week", "asserted", 2, "since_last_week"),
        _ev("location", "right_upper_belly", "asserted", 2, "since_last_week"),
        _ev("oily_food_trigger", "present", "asserted", 2, "since_last_week"),
        _ev("postprandial_worsening", "present", "asserted", 4),
        _ev("oily_food_trigger", "present", "asserted", 4),
        _ev("heartburn", "present", "negated", 4),
        _ev("nausea", "present", "asserted", 4),
        _ev("weight_loss", "present", "asserted", 6),
        _ev("blood_in_stool", "present", "asserted", 6),
        _ev("alcohol_use", "present", "asserted", 8),
        _ev("daily_painkillers", "present", "negated", 8),
    ]
    models = {
        "ask:severity": _model(hyp, {
            "moderate": ("it is moderate and comes in waves.",
                         {"biliary_colic": 1.0, "peptic_ulcer": 0.4, "reflux_esophagitis": 0.5}),
            "mild": ("mild mostly.",
                     {"peptic_ulcer": 0.6, "reflux_esophagitis": 0.5}),
        }),
        "ask:abdominal_pain": _ack(hyp, "yes my stomach hurts most days."),
        "ask:onset": _ack(hyp, "it started last week."),
        "ask:location": _ack(hyp, "it sits under my right ribs."),
        "verify:biliary_colic": _model(hyp, {
            "yes": ("yes it cramps under the right ribs after fried or oily food.",
                    {"biliary_colic": 1.0, "peptic_ulcer": 0.2, "reflux_esophagitis": 0.2}),
            "no": ("food does not seem to matter much.",
                   {"peptic_ulcer": 0.8, "reflux_esophagitis": 0.8}),
        }),
        "verify:peptic_ulcer": _model(hyp, {
            "yes": ("an empty stomach gnaws and food calms it.",
                    {"peptic_ulcer": 0.85, "reflux_esophagitis": 0.1}),
            "no": ("an empty stomach changes nothing for me.",
                   {"biliary_colic": 1.0, "peptic_ulcer": 0.15, "reflux_esophagitis": 0.9}),
        }),
        "verify:reflux_esophagitis": _model(hyp, {
            "yes": ("there is burning with a sour taste when lying down.",
                    {"peptic_ulcer": 0.1, "reflux_esophagitis": 0.95}),
            "no": ("no burning and no sour taste even lying down.",
                   {"biliary_colic": 1.0, "peptic_ulcer": 0.9, "reflux_esophagitis": 0.05}),
        }),
        "recommend_exam:exam_catalog/ultrasound": _model(hyp, {
            "stones": ("the ultrasound shows gallstones in the gallbladder.",
                       {"biliary_colic": 1.0, "peptic_ulcer": 0.05, "reflux_esophagitis": 0.05}),
            "clear": ("the ultrasound looks clear.",
                      {"peptic_ulcer": 0.95, "reflux_esophagitis": 0.95}),
        }),
        "recommend_exam:exam_catalog/belly_panel": _ack(hyp, "the panel summary is filed with the chart."),
        "recommend_exam:exam_catalog/vitals": _ack(hyp, "the vitals sheet is added to the chart."),
        "risk_close:r_gi_bleed": _ack(hyp, "a same week stool test and blood check are arranged."),
        "risk_close:r_weight_loss_flag": _ack(hyp, "we will track my weight weekly from here."),
        "risk_close:r_gallstone_confirmed": _ack(hyp, "a surgical opinion on the gallstones is booked."),
    }
    return {
        "case_id": "abdominal_pain_02",
        "true_hypothesis": "biliary_colic",
        "hypotheses": {
            "ids": hyp,
            "names": ["biliary colic", "peptic ulcer", "reflux"],
            "keywords": {
                "biliary_colic": ["oily", "fried", "greasy", "ribs", "gallstones", "queasy"],
                "peptic_ulcer": ["gnawing", "ulcer", "dark stools", "empty stomach", "hungry"],
                "reflux_esophagitis": ["burning", "heartburn", "sour", "lying down", "acid"],
            },
        },
        "rule_evidence": {
            "biliary_colic": [
                ["oily_food_trigger", "asserted", None, 1.5],
                ["postprandial_worsening", "asserted", None, 1.0],
                ["location", "asserted", "right_upper_belly", 1.5],
                ["nausea", "asserted", None, 0.5],
                ["exam_ultrasound", "asserted", "gallstones", 2.5],
            ],
            "peptic_ulcer": [
                ["blood_in_stool", "asserted", None, 1.0],
                ["weight_loss", "asserted", None, 1.0],
                ["prior_ulcer_history", "asserted", None, 1.5],
                ["eating_relief", "asserted", None, 1.0],
            ],
            "reflux_esophagitis": [
                ["heartburn", "asserted", None, 2.0],
                ["sour_taste", "asserted", None, 1.0],
                ["night_worsening", "asserted", None, 0.5],
            ],
        },
        "script": script,
        "goal": {
            "required_slots": ["abdominal_pain", "onset", "location", "severity"],
            "confidence_floor": 0.45,
            "risk_checks": [
                {"risk_id": "r_gi_bleed", "trigger": [["blood_in_stool", "asserted", None]]},
                {"risk_id": "r_weight_loss_flag", "trigger": [["weight_loss", "asserted", None]]},
                {"risk_id": "r_gallstone_confirmed",
                 "trigger": [["exam_ultrasound", "asserted", "gallstones"]]},
            ],
        },
        "gold_events": gold_events,
        "gold_information_items": [
            ["abdominal_pain", "present", "asserted"],
            ["onset", "last_week", "asserted"],
            ["location", "right_upper_belly", "asserted"],
            ["oily_food_trigger", "present", "asserted"],
            ["postprandial_worsening", "present", "asserted"],
            ["nausea", "present", "asserted"],
            ["heartburn", "present", "negated"],
            ["weight_loss", "present", "asserted"],
            ["blood_in_stool", "present", "asserted"],
            ["alcohol_use", "present", "asserted"],
            ["daily_painkillers", "present", "negated"],
            ["severity", "moderate", "asserted"],
            ["exam_ultrasound", "gallstones", "asserted"],
            ["sour_taste", "present", "negated"],
        ],
        "gold_slot_values": {
            "abdominal_pain": ["present", "asserted"],
            "onset": ["last_week", "asserted"],
            "location": ["right_upper_belly", "asserted"],
            "severity": ["moderate", "asserted"],
        },
        "preferred_actions": {"default_kinds": ["ask", "verify", "recommend_exam", "risk_close"],
                              "conclude_when_goal_met": True},
        "observation_models": models,
        "query_ids": ["q_abd_01", "q_abd_02", "q_abd_03", "q_abd_04", "q_abd_05"],
    }


def case_cough() -> dict:
    hyp = ["chest_infection", "asthma_flare", "post_viral_cough"]
    script = {
        "case_id": "cough_03",
        "turns": [
            {"role": "doctor", "text": "what brings you in?"},
            {"role": "patient",
             "text": "a heavy cough started two days ago. i feel feverish in the evenings. "
                     "there are chills at night too.",
             "boundary_styles": ["long", "dip"]},
            {"role": "doctor", "text": "does anything come up when you cough?"},
            {"role": "patient",
             "text": "so yes it brings up thick green phlegm. there is no wheeze when i breathe.",
             "boundary_styles": ["long"]},
            {"role": "patient",
             "text": "okay one more thing. also climbing the stairwell leaves me winded. my "
                     "chest aches on one side when i breathe deep.",
             "boundary_styles": ["cue", "dip"]},
            {"role": "doctor", "text": "did you have a cold before this?"},
            {"role": "patient",
             "text": "there was a small cold last month. this feels different and worse. i "
                     "have not managed any exercise since it started.",
             "boundary_styles": ["long", "long"]},
            {"role": "doctor", "text": "alright thanks. we will get this sorted.",
             "boundary_styles": ["cue"]},
        ],
    }
    gold_events = [
        _ev("cough", "present", "asserted", 2, "for_two_days"),
        _ev("onset", "two_days_ago", "asserted", 2, "for_two_days"),
        _ev("fever", "present", "asserted", 2),
        _ev("night_worsening", "present", "asserted", 2),
        _ev("cough", "present", "asserted", 3),
        _ev("wheeze", "present", "negated", 4),
        _ev("shortness_of_breath", "present", "asserted", 5),
        _ev("location", "one_side", "asserted", 5),
        _ev("exertional_worsening", "present", "negated", 7),
    ]
    models = {
        "ask:severity": _model(hyp, {
            "severe": ("it is severe enough to stop me mid sentence.",
                       {"chest_infection": 1.0, "asthma_flare": 0.3, "post_viral_cough": 0.2}),
            "moderate": ("moderate i suppose.",
                         {"asthma_flare": 0.7, "post_viral_cough": 0.8}),
        }),
        "ask:cough": _ack(hyp, "yes the cough is constant."),
        "ask:onset": _ack(hyp, "it started two days ago."),
        "ask:fever": _ack(hyp, "yes i feel feverish."),
        "verify:chest_infection": _model(hyp, {
            "yes": ("yes there is fever with thick green phlegm on one side.",
                    {"chest_infection": 1.0, "asthma_flare": 0.2, "post_viral_cough": 0.15}),
            "no": ("the phlegm is thin and there is no real fever.",
                   {"asthma_flare": 0.8, "post_viral_cough": 0.85}),
        }),
        "verify:asthma_flare": _model(hyp, {
            "yes": ("wheezing wakes me and an inhaler would calm it.",
                    {"asthma_flare": 0.85, "post_viral_cough": 0.1}),
            "no": ("there is no wheezing and an inhaler never helped.",
                   {"chest_infection": 1.0, "asthma_flare": 0.15, "post_viral_cough": 0.9}),
        }),
        "verify:post_viral_cough": _model(hyp, {
            "yes": ("it lingers dry like a tickle since the cold.",
                    {"asthma_flare": 0.1, "post_viral_cough": 0.9}),
            "no": ("it is wet and heavy and nothing like the cold.",
                   {"chest_infection": 1.0, "asthma_flare": 0.9, "post_viral_cough": 0.1}),
        }),
        "recommend_exam:exam_catalog/chest_xray": _model(hyp, {
            "infiltrate": ("the xray report shows an infiltrate at the right base.",
                           {"chest_infection": 1.0, "asthma_flare": 0.02, "post_viral_cough": 0.02}),
            "clear": ("the xray report is clear.",
                      {"asthma_flare": 0.98, "post_viral_cough": 0.98}),
        }),
        "recommend_exam:exam_catalog/spirometry": _model(hyp, {
            "obstruction": ("the breathing test shows obstruction that eases with a puffer.",
                            {"chest_infection": 0.05, "asthma_flare": 0.9, "post_viral_cough": 0.1}),
            "normal": ("the breathing test is within range.",
                       {"chest_infection": 0.95, "asthma_flare": 0.1, "post_viral_cough": 0.9}),
        }),
        "recommend_exam:exam_catalog/cough_panel": _ack(hyp, "the panel summary is filed with the chart."),
        "recommend_exam:exam_catalog/vitals": _ack(hyp, "the vitals sheet is added to the chart."),
        "risk_close:r_pneumonia_pattern": _ack(hyp, "a same week lung film is booked."),
        "risk_close:r_infiltrate_confirmed": _ack(hyp, "a treatment course for the infiltrate starts today."),
    }
    return {
        "case_id": "cough_03",
        "true_hypothesis": "chest_infection",
        "hypotheses": {
            "ids": hyp,
            "names": ["chest infection", "asthma flare", "post viral cough"],
            "keywords": {
                "chest_infection": ["feverish", "fever", "chills", "green", "phlegm", "infiltrate"],
                "asthma_flare": ["wheeze", "wheezing", "whistling", "inhaler", "puffer"],
                "post_viral_cough": ["cold", "lingering", "dry", "tickle"],
            },
        },
        "rule_evidence": {
            "chest_infection": [
                ["fever", "asserted", None, 1.5],
                ["cough", "asserted", None, 1.0],
                ["location", "asserted", "one_side", 1.0],
                ["exam_xray", "asserted", "infiltrate", 2.5],
            ],
            "asthma_flare": [
                ["wheeze", "asserted", None, 2.0],
                ["night_worsening", "asserted", None, 1.0],
                ["exam_spirometry", "asserted", "obstruction", 2.5],
            ],
            "post_viral_cough": [
                ["cough", "asserted", None, 0.5],
                ["fever", "negated", None, 1.0],
            ],
        },
        "script": script,
        "goal": {
            "required_slots": ["cough", "onset", "fever", "severity"],
            "confidence_floor": 0.45,
            "risk_checks": [
                {"risk_id": "r_pneumonia_pattern",
                 "trigger": [["fever", "asserted", None], ["cough", "asserted", None]]},
                {"risk_id": "r_infiltrate_confirmed",
                 "trigger": [["exam_xray", "asserted", "infiltrate"]]},
            ],
        },
        "gold_events": gold_events,
        "gold_information_items": [
            ["cough", "present", "asserted"],
            ["onset", "two_days_ago", "asserted"],
            ["fever", "present", "asserted"],
            ["night_worsening", "present", "asserted"],
            ["wheeze", "present", "negated"],
            ["shortness_of_breath", "present", "asserted"],
            ["location", "one_side", "asserted"],
            ["exertional_worsening", "present", "negated"],
            ["severity", "severe", "asserted"],
            ["exam_xray", "infiltrate", "asserted"],
        ],
        "gold_slot_values": {
            "cough": ["present", "asserted"],
            "onset": ["two_days_ago", "asserted"],
            "fever": ["present", "asserted"],
            "severity": ["severe", "asserted"],
        },
        "preferred_actions": {"default_kinds": ["ask", "verify", "recommend_exam", "risk_close"],
                              "conclude_when_goal_met": True},
        "observation_models": models,
        "query_ids": ["q_cough_01", "q_cough_02", "q_cough_03", "q_cough_04", "q_cough_05"],
    }


def case_headache() -> dict:
    hyp = ["migraine", "tension_headache", "medication_overuse"]
    script = {
        "case_id": "headache_04",
        "turns": [
            {"role": "doctor", "text": "what brings you in today?"},
            {"role": "patient",
             "text": "these headaches started last week. the pain throbs on one side. i "
                     "feel queasy when it peaks.",
             "boundary_styles": ["long", "dip"]},
            {"role": "doctor", "text": "does light or noise bother you?"},
            {"role": "patient",
             "text": "bright light hurts when it is bad. so i end up lying down in the "
                     "dark. no fever. also the queasy spells keep on.",
             "boundary_styles": ["cue", "long", "cue"]},
            {"role": "doctor", "text": "how often do you reach for the tablets?"},
            {"role": "patient",
             "text": "i take ibuprofen most days lately. it wears off by lunch. the "
                     "headaches keep coming back anyway.",
             "boundary_styles": ["long", "long"]},
            {"role": "patient",
             "text": "one episode came with zigzag lines in my vision. that scared me "
                     "honestly. nothing like this before last week.",
             "boundary_styles": ["dip", "long"]},
            {"role": "doctor", "text": "alright thanks. let us plan the next steps.",
             "boundary_styles": ["cue"]},
        ],
    }
    gold_events = [
        _ev("headache", "present", "asserted", 2, "since_last_week"),
        _ev("onset", "last_week", "asserted", 2, "since_last_week"),
        _ev("location", "one_side", "asserted", 2),
        _ev("nausea", "present", "asserted", 2),
        _ev("light_sensitivity", "present", "asserted", 4),
        _ev("night_worsening", "present", "asserted", 4),
        _ev("fever", "present", "negated", 4),
        _ev("nausea", "present", "asserted", 4),
        _ev("daily_painkillers", "present", "asserted", 6, "recently"),
        _ev("headache", "present", "asserted", 6, "recently"),
        _ev("aura", "present", "asserted", 7),
        _ev("onset", "last_week", "asserted", 7, "since_last_week"),
    ]
    models = {
        "ask:severity": _model(hyp, {
            "severe": ("severe when it peaks.",
                       {"migraine": 1.0, "tension_headache": 0.3, "medication_overuse": 0.4}),
            "moderate": ("more moderate i would say.",
                         {"tension_headache": 0.7, "medication_overuse": 0.6}),
        }),
        "ask:headache": _ack(hyp, "yes the headaches are frequent."),
        "ask:onset": _ack(hyp, "they started last week."),
        "ask:location": _ack(hyp, "the pain sits on one side."),
        "verify:migraine": _model(hyp, {
            "yes": ("yes it throbs with queasy spells and the light hurts.",
                    {"migraine": 1.0, "tension_headache": 0.2, "medication_overuse": 0.25}),
            "no": ("it is more of a dull everyday ache.",
                   {"tension_headache": 0.8, "medication_overuse": 0.75}),
        }),
        "verify:tension_headache": _model(hyp, {
            "yes": ("it does feel like a band after long screens.",
                    {"tension_headache": 0.85, "medication_overuse": 0.2}),
            "no": ("screens and the neck make no difference to it.",
                   {"migraine": 1.0, "tension_headache": 0.15, "medication_overuse": 0.8}),
        }),
        "verify:medication_overuse": _model(hyp, {
            "yes": ("the tablets themselves seem to invite the next round.",
                    {"tension_headache": 0.2, "medication_overuse": 0.8}),
            "no": ("skipping the tablets for a day changes nothing.",
                   {"migraine": 1.0, "tension_headache": 0.8, "medication_overuse": 0.2}),
        }),
        "recommend_exam:exam_catalog/headache_diary": _model(hyp, {
            "pattern": ("the diary shows a clear migraine pattern with aura days.",
                        {"migraine": 1.0, "tension_headache": 0.05, "medication_overuse": 0.1}),
            "flat": ("the diary shows flat daily aches tied to screens.",
                     {"tension_headache": 0.95, "medication_overuse": 0.9}),
        }),
        "recommend_exam:exam_catalog/headache_panel": _ack(hyp, "the panel summary is filed with the chart."),
        "recommend_exam:exam_catalog/vitals": _ack(hyp, "the vitals sheet is added to the chart."),
        "risk_close:r_overuse_pattern": _ack(hyp, "a structured taper plan for the tablets starts this week."),
        "risk_close:r_red_flag_aura": _ack(hyp, "the aura episodes are documented for urgent review if they change."),
    }
    return {
        "case_id": "headache_04",
        "true_hypothesis": "migraine",
        "hypotheses": {
            "ids": hyp,
            "names": ["migraine", "tension headache", "medication overuse"],
            "keywords": {
                "migraine": ["throbs", "throbbing", "queasy", "light", "zigzag", "aura"],
                "tension_headache": ["band", "neck", "screens", "stress"],
                "medication_overuse": ["ibuprofen", "painkillers", "tablets", "daily"],
            },
        },
        "rule_evidence": {
            "migraine": [
                ["light_sensitivity", "asserted", None, 1.5],
                ["nausea", "asserted", None, 1.0],
                ["location", "asserted", "one_side", 1.0],
                ["aura", "asserted", None, 2.0],
                ["exam_diary", "asserted", "migraine_pattern", 2.5],
            ],
            "tension_headache": [
                ["screen_time_trigger", "asserted", None, 1.5],
                ["location", "asserted", "temples", 1.0],
            ],
            "medication_overuse": [
                ["daily_painkillers", "asserted", None, 2.0],
                ["headache", "asserted", None, 0.5],
            ],
        },
        "script": script,
        "goal": {
            "required_slots": ["headache", "onset", "severity", "location"],
            "confidence_floor": 0.45,
            "risk_checks": [
                {"risk_id": "r_overuse_pattern",
                 "trigger": [["daily_painkillers", "asserted", None],
                             ["headache", "asserted", None]]},
                {"risk_id": "r_red_flag_aura",
                 "trigger": [["aura", "asserted", None]]},
            ],
        },
        "gold_events": gold_events,
        "gold_information_items": [
            ["headache", "present", "asserted"],
            ["onset", "last_week", "asserted"],
            ["location", "one_side", "asserted"],
            ["nausea", "present", "asserted"],
            ["light_sensitivity", "present", "asserted"],
            ["night_worsening", "present", "asserted"],
            ["fever", "present", "negated"],
            ["daily_painkillers", "present", "asserted"],
            ["aura", "present", "asserted"],
            ["severity", "severe", "asserted"],
            ["exam_diary", "migraine_pattern", "asserted"],
        ],
        "gold_slot_values": {
            "headache": ["present", "asserted"],
            "onset": ["last_week", "asserted"],
            "severity": ["severe", "asserted"],
            "location": ["one_side", "asserted"],
        },
        "preferred_actions": {"default_kinds": ["ask", "verify", "recommend_exam", "risk_close"],
                              "conclude_when_goal_met": True},
        "observation_models": models,
        "query_ids": ["q_head_01", "q_head_02", "q_head_03", "q_head_04"],
    }


def case_joint() -> dict:
    hyp = ["gout_flare", "osteoarthritis", "inflammatory_arthritis"]
    script = {
        "case_id": "joint_pain_05",
        "turns": [
            {"role": "doctor", "text": "what can i help with today?"},
            {"role": "patient",
             "text": "my big toe joint flared up last night. the joint pain is severe. the "
                     "skin there looks red and feels hot.",
             "boundary_styles": ["long", "long"]},
            {"role": "doctor", "text": "did anything trigger it?"},
            {"role": "patient",
             "text": "we had a big dinner with wine the evening before. so the timing fits "
                     "something i ate or drank. no injury that i remember.",
             "boundary_styles": ["cue", "long"]},
            {"role": "doctor", "text": "how are your other joints?"},
            {"role": "patient",
             "text": "other joints feel fine with daily activity. no morning stiffness. a "
                     "fever came overnight though.",
             "boundary_styles": ["long", "dip"]},
            {"role": "doctor", "text": "alright thanks. i have what i need for the moment.",
             "boundary_styles": ["cue"]},
        ],
    }
    gold_events = [
        _ev("location", "big_toe", "asserted", 2, "since_last_night"),
        _ev("onset", "last_night", "asserted", 2, "since_last_night"),
        _ev("joint_pain", "present", "asserted", 2, "since_last_night"),
        _ev("severity", "severe", "asserted", 2, "since_last_night"),
        _ev("alcohol_use", "present", "asserted", 4),
        _ev("morning_stiffness", "present", "negated", 6),
        _ev("fever", "present", "asserted", 6),
    ]
    models = {
        "ask:joint_swelling": _model(hyp, {
            "yes": ("there is some swelling right around that toe joint.",
                    {"gout_flare": 1.0, "osteoarthritis": 0.2, "inflammatory_arthritis": 0.8}),
            "no": ("no real swelling anywhere.",
                   {"osteoarthritis": 0.8, "inflammatory_arthritis": 0.2}),
        }),
        "ask:joint_pain": _ack(hyp, "yes the joint pain is the problem."),
        "ask:onset": _ack(hyp, "it flared last night."),
        "ask:location": _ack(hyp, "it is the big toe."),
        "ask:severity": _ack(hyp, "severe enough to wake me."),
        "verify:gout_flare": _model(hyp, {
            "yes": ("yes it came on hot and red overnight after the wine.",
                    {"gout_flare": 1.0, "osteoarthritis": 0.15, "inflammatory_arthritis": 0.25}),
            "no": ("it built up slowly over weeks.",
                   {"osteoarthritis": 0.85, "inflammatory_arthritis": 0.75}),
        }),
        "verify:osteoarthritis": _model(hyp, {
            "yes": ("it grinds with activity and calms with sitting.",
                    {"osteoarthritis": 0.85, "inflammatory_arthritis": 0.1}),
            "no": ("activity does not drive it and rest changes nothing.",
                   {"gout_flare": 1.0, "osteoarthritis": 0.15, "inflammatory_arthritis": 0.9}),
        }),
        "verify:inflammatory_arthritis": _model(hyp, {
            "yes": ("mornings lock up for an hour on both sides.",
                    {"osteoarthritis": 0.1, "inflammatory_arthritis": 0.85}),
            "no": ("there is no warmth on both sides and mornings feel fine.",
                   {"gout_flare": 1.0, "osteoarthritis": 0.9, "inflammatory_arthritis": 0.15}),
        }),
        "recommend_exam:exam_catalog/joint_fluid": _model(hyp, {
            "crystals": ("the joint fluid shows urate crystals.",
                         {"gout_flare": 1.0, "osteoarthritis": 0.02, "inflammatory_arthritis": 0.05}),
            "clear": ("the joint fluid is unremarkable.",
                      {"osteoarthritis": 0.98, "inflammatory_arthritis": 0.95}),
        }),
        "recommend_exam:exam_catalog/joint_panel": _ack(hyp, "the panel summary is filed with the chart."),
        "recommend_exam:exam_catalog/vitals": _ack(hyp, "the vitals sheet is added to the chart."),
        "risk_close:r_septic_joint": _ack(hyp, "urgent fluid checks are arranged for the hot joint with fever."),
        "risk_close:r_crystal_confirmed": _ack(hyp, "a flare treatment plan for the crystals starts today."),
    }
    return {
        "case_id": "joint_pain_05",
        "true_hypothesis": "gout_flare",
        "hypotheses": {
            "ids": hyp,
            "names": ["gout flare", "osteoarthritis", "inflammatory arthritis"],
            "keywords": {
                "gout_flare": ["toe", "hot", "red", "wine", "overnight", "crystals"],
                "osteoarthritis": ["activity", "grinds", "older", "sitting"],
                "inflammatory_arthritis": ["morning", "stiffness", "both", "warm", "swelling"],
            },
        },
        "rule_evidence": {
            "gout_flare": [
                ["location", "asserted", "big_toe", 2.0],
                ["onset", "asserted", "last_night", 0.5],
                ["alcohol_use", "asserted", None, 1.0],
                ["exam_joint_fluid", "asserted", "crystals", 2.5],
                ["fever", "asserted", None, 0.5],
            ],
            "osteoarthritis": [
                ["movement_worsening", "asserted", None, 1.0],
                ["location", "asserted", "knees", 2.0],
            ],
            "inflammatory_arthritis": [
                ["morning_stiffness", "asserted", None, 2.0],
                ["joint_swelling", "asserted", None, 1.0],
                ["fever", "asserted", None, 1.0],
            ],
        },
        "script": script,
        "goal": {
            "required_slots": ["joint_pain", "onset", "location", "severity", "joint_swelling"],
            "confidence_floor": 0.45,
            "risk_checks": [
                {"risk_id": "r_septic_joint",
                 "trigger": [["fever", "asserted", None], ["joint_pain", "asserted", None]]},
                {"risk_id": "r_crystal_confirmed",
                 "trigger": [["exam_joint_fluid", "asserted", "crystals"]]},
            ],
        },
        "gold_events": gold_events,
        "gold_information_items": [
            ["joint_pain", "present", "asserted"],
            ["onset", "last_night", "asserted"],
            ["location", "big_toe", "asserted"],
            ["severity", "severe", "asserted"],
            ["alcohol_use", "present", "asserted"],
            ["morning_stiffness", "present", "negated"],
            ["fever", "present", "asserted"],
            ["joint_swelling", "present", "asserted"],
            ["exam_joint_fluid", "crystals", "asserted"],
        ],
        "gold_slot_values": {
            "joint_pain": ["present", "asserted"],
            "onset": ["last_night", "asserted"],
            "location": ["big_toe", "asserted"],
            "severity": ["severe", "asserted"],
            "joint_swelling": ["present", "asserted"],
        },
        "preferred_actions": {"default_kinds": ["ask", "verify", "recommend_exam", "risk_close"],
                              "conclude_when_goal_met": True},
        "observation_models": models,
        "query_ids": ["q_joint_01", "q_joint_02", "q_joint_03", "q_joint_04"],
    }


def case_dizziness() -> dict:
    # Stabilization stress case: hypothesis keywords alternate turn by turn,
    # required slots are all script-fillable, and the confidence floor sits
    # between the raw and temperature-flattened peak beliefs.
    hyp = ["anemia", "bppv", "orthostatic"]
    script = {
        "case_id": "dizziness_06",
        "turns": [
            {"role": "doctor", "text": "what brings you in?"},
            {"role": "patient",
             "text": "i keep feeling dizzy. it started last week. i look pale to me in the "
                     "mirror.",
             "boundary_styles": ["long", "long"]},
            {"role": "doctor", "text": "when does it hit hardest?"},
            {"role": "patient",
             "text": "rolling over in bed sets off a spin for a few moments. the episodes "
                     "feel severe while they last.",
             "boundary_styles": ["dip"]},
            {"role": "patient",
             "text": "climbing two flights leaves me winded and tired lately."},
            {"role": "patient",
             "text": "i stood up quickly this evening and nearly fainted. my partner said i "
                     "blacked out for a moment.",
             "boundary_styles": ["long"]},
            {"role": "doctor", "text": "alright thanks. give me a moment to plan the checks.",
             "boundary_styles": ["cue"]},
        ],
    }
    gold_events = [
        _ev("dizziness", "present", "asserted", 2, "since_last_week"),
        _ev("onset", "last_week", "asserted", 2, "since_last_week"),
        _ev("pallor", "present", "asserted", 2, "since_last_week"),
        _ev("severity", "severe", "asserted", 4),
        _ev("shortness_of_breath", "present", "asserted", 5, "recently"),
        _ev("fatigue", "present", "asserted", 5, "recently"),
        _ev("fainting", "present", "asserted", 6),
        _ev("fainting", "present", "asserted", 6),
    ]
    models = {
        "ask:dizziness": _ack(hyp, "yes the dizzy spells keep coming."),
        "ask:onset": _ack(hyp, "it started last week."),
        "ask:severity": _ack(hyp, "severe while it lasts."),
        "verify:anemia": _model(hyp, {
            "yes": ("yes i have looked pale and felt tired for days.",
                    {"anemia": 1.0, "bppv": 0.15, "orthostatic": 0.2}),
            "no": ("my color and energy feel normal.",
                   {"bppv": 0.85, "orthostatic": 0.8}),
        }),
        "verify:bppv": _model(hyp, {
            "yes": ("rolling over in bed spins the room for moments.",
                    {"bppv": 0.9, "orthostatic": 0.1}),
            "no": ("turning in bed changes nothing and i stay tired.",
                   {"anemia": 1.0, "bppv": 0.1, "orthostatic": 0.9}),
        }),
        "verify:orthostatic": _model(hyp, {
            "yes": ("it mostly hits right after i have stood up fast.",
                    {"anemia": 0.05, "bppv": 0.05, "orthostatic": 0.9}),
            "no": ("standing speed makes no difference and i look pale regardless.",
                   {"anemia": 0.95, "bppv": 0.95, "orthostatic": 0.1}),
        }),
        "recommend_exam:exam_catalog/blood_count": _model(hyp, {
            "low": ("the blood count shows low hemoglobin.",
                    {"anemia": 1.0, "bppv": 0.02, "orthostatic": 0.02}),
            "normal": ("the blood count is normal.",
                       {"bppv": 0.98, "orthostatic": 0.98}),
        }),
        "recommend_exam:exam_catalog/dizzy_panel": _ack(hyp, "the panel summary is filed with the chart."),
        "recommend_exam:exam_catalog/vitals": _ack(hyp, "the vitals sheet is added to the chart."),
        "risk_close:r_fainting_collapse": _ack(hyp, "same day checks and a standing measure are arranged."),
        "risk_close:r_anemia_confirmed": _ack(hyp, "iron studies and a repeat count are booked for the low hemoglobin."),
    }
    return {
        "case_id": "dizziness_06",
        "true_hypothesis": "anemia",
        "hypotheses": {
            "ids": hyp,
            "names": ["anemia", "positional vertigo", "standing drop"],
            "keywords": {
                "anemia": ["pale", "tired", "hemoglobin", "iron"],
                "bppv": ["rolling over"],
                "orthostatic": ["stood up"],
            },
        },
        "rule_evidence": {
            "anemia": [
                ["pallor", "asserted", None, 1.5],
                ["fatigue", "asserted", None, 1.0],
                ["shortness_of_breath", "asserted", None, 1.0],
                ["exam_blood_count", "asserted", "low_hemoglobin", 3.0],
            ],
            "bppv": [],
            "orthostatic": [
                ["fainting", "asserted", None, 1.5],
            ],
        },
        "script": script,
        "goal": {
            "required_slots": ["dizziness", "onset", "severity"],
            "confidence_floor": 0.58,
            "risk_checks": [
                {"risk_id": "r_fainting_collapse",
                 "trigger": [["fainting", "asserted", None]]},
                {"risk_id": "r_anemia_confirmed",
                 "trigger": [["exam_blood_count", "asserted", "low_hemoglobin"]]},
            ],
        },
        "gold_events": gold_events,
        "gold_information_items": [
            ["dizziness", "present", "asserted"],
            ["onset", "last_week", "asserted"],
            ["severity", "severe", "asserted"],
            ["pallor", "present", "asserted"],
            ["fatigue", "present", "asserted"],
            ["shortness_of_breath", "present", "asserted"],
            ["fainting", "present", "asserted"],
            ["exam_blood_count", "low_hemoglobin", "asserted"],
        ],
        "gold_slot_values": {
            "dizziness": ["present", "asserted"],
            "onset": ["last_week", "asserted"],
            "severity": ["severe", "asserted"],
        },
        "preferred_actions": {"default_kinds": ["ask", "verify", "recommend_exam", "risk_close"],
                              "conclude_when_goal_met": True},
        "observation_models": models,
        "query_ids": ["q_dizzy_01", "q_dizzy_02", "q_dizzy_03", "q_dizzy_04"],
    }


def build_qrels() -> list[dict]:
    def q(qid, query, relevant, paths=(), fields=()):
        return {"query_id": qid, "query": query, "relevant_objects": list(relevant),
                "relevant_paths": [list(p) for p in paths], "fields": list(fields)}

    return [
        q("q_chest_01", "exertional chest tightness eased by rest",
          ["cardio_handbook/sym_exertional", "cardio_handbook/dx_cardiac"],
          [("cardio_handbook/sym_exertional", "cardio_handbook/dx_cardiac")],
          ["chest_tightness", "exertional_worsening", "rest_relief"]),
        q("q_chest_02", "exam to confirm cardiac ischemia behind exertional tightness",
          ["exam_catalog/ecg", "cardio_handbook/dx_cardiac"],
          [("cardio_handbook/dx_cardiac", "exam_catalog/ecg")],
          ["chest_tightness", "exertional_worsening"]),
        q("q_chest_03", "chest pressure spreading to the left shoulder",
          ["cardio_handbook/sym_radiation", "cardio_handbook/dx_cardiac"],
          [("cardio_handbook/sym_radiation", "cardio_handbook/dx_cardiac")],
          ["chest_tightness", "radiation_left_arm"]),
        q("q_chest_04", "burning behind the breastbone after meals",
          ["gi_handbook/dx_reflux", "gi_handbook/sym_heartburn"],
          [("gi_handbook/sym_heartburn", "gi_handbook/dx_reflux")]),
        q("q_chest_05", "chest wall soreness tender to touch",
          ["chestwall_notes/dx_strain", "chestwall_notes/sym_tender"],
          [("chestwall_notes/sym_tender", "chestwall_notes/dx_strain")]),
        q("q_abd_01", "right upper belly pain after oily food",
          ["gi_handbook/dx_biliary", "gi_handbook/sym_oily"],
          [("gi_handbook/sym_oily", "gi_handbook/dx_biliary")],
          ["location", "oily_food_trigger"]),
        q("q_abd_02", "scan to confirm gallstones behind fatty food cramps",
          ["exam_catalog/ultrasound", "gi_handbook/dx_biliary"],
          [("gi_handbook/dx_biliary", "exam_catalog/ultrasound")],
          ["oily_food_trigger", "nausea"]),
        q("q_abd_03", "blood in the stool with weight loss warning signs",
          ["risk_rules/gi_bleed_rule", "gi_handbook/dx_ulcer"],
          [("risk_rules/gi_bleed_rule", "gi_handbook/dx_ulcer")],
          ["blood_in_stool"]),
        q("q_abd_04", "gnawing pain calmed by eating",
          ["gi_handbook/dx_ulcer"]),
        q("q_abd_05", "burning with a sour taste lying down",
          ["gi_handbook/dx_reflux", "gi_handbook/sym_heartburn"],
          [("gi_handbook/sym_heartburn", "gi_handbook/dx_reflux")]),
        q("q_cough_01", "fever with productive cough and one side ache",
          ["resp_handbook/dx_infection", "resp_handbook/sym_productive"],
          [("resp_handbook/sym_productive", "resp_handbook/dx_infection")],
          ["fever", "cough", "location"]),
        q("q_cough_02", "film to confirm an infiltrate in the lung",
          ["exam_catalog/chest_xray", "resp_handbook/dx_infection"],
          [("resp_handbook/dx_infection", "exam_catalog/chest_xray")],
          ["fever", "cough"]),
        q("q_cough_03", "night wheeze that an inhaler settles",
          ["resp_handbook/dx_asthma", "resp_handbook/sym_wheeze"],
          [("resp_handbook/sym_wheeze", "resp_handbook/dx_asthma")],
          ["night_worsening"]),
        q("q_cough_04", "lingering dry cough after a cold",
          ["resp_handbook/dx_postviral"]),
        q("q_cough_05", "breathing flow test for airway narrowing",
          ["exam_catalog/spirometry", "resp_handbook/dx_asthma"],
          [("resp_handbook/dx_asthma", "exam_catalog/spirometry")]),
        q("q_head_01", "one side throbbing headache with nausea and light sensitivity",
          ["neuro_handbook/dx_migraine", "neuro_handbook/sym_throbbing"],
          [("neuro_handbook/sym_throbbing", "neuro_handbook/dx_migraine")],
          ["headache", "location", "nausea", "light_sensitivity"]),
        q("q_head_02", "daily painkillers with rebound headache",
          ["neuro_handbook/dx_overuse", "risk_rules/overuse_rule"],
          [("risk_rules/overuse_rule", "neuro_handbook/dx_overuse")],
          ["daily_painkillers", "headache"]),
        q("q_head_03", "band of pressing tightness from screen time",
          ["neuro_handbook/dx_tension"]),
        q("q_head_04", "structured diary mapping aura days and light triggers",
          ["exam_catalog/headache_diary", "neuro_handbook/dx_migraine"],
          [("neuro_handbook/dx_migraine", "exam_catalog/headache_diary")],
          ["headache", "light_sensitivity"]),
        q("q_joint_01", "sudden hot red big toe joint pain at night",
          ["joint_handbook/dx_gout", "joint_handbook/sym_toe"],
          [("joint_handbook/sym_toe", "joint_handbook/dx_gout")],
          ["joint_pain", "location", "onset"]),
        q("q_joint_02", "fluid from the flare site showing urate crystals",
          ["exam_catalog/joint_fluid", "joint_handbook/dx_gout"],
          [("joint_handbook/dx_gout", "exam_catalog/joint_fluid")],
          ["joint_pain", "fever"]),
        q("q_joint_03", "morning stiffness with swollen warm joints",
          ["joint_handbook/dx_inflam"]),
        q("q_joint_04", "knee pain worse with activity in older adults",
          ["joint_handbook/dx_oa"]),
        q("q_dizzy_01", "dizziness with pallor and tiredness",
          ["blood_handbook/dx_anemia", "blood_handbook/sym_pallor"],
          [("blood_handbook/sym_pallor", "blood_handbook/dx_anemia")],
          ["dizziness", "pallor", "fatigue"]),
        q("q_dizzy_02", "red cell count for low hemoglobin",
          ["exam_catalog/blood_count", "blood_handbook/dx_anemia"],
          [("blood_handbook/dx_anemia", "exam_catalog/blood_count")],
          ["dizziness", "fainting"]),
        q("q_dizzy_03", "brief spinning when rolling over in bed",
          ["balance_notes/dx_bppv"]),
        q("q_dizzy_04", "faint right after standing up quickly",
          ["balance_notes/dx_orthostatic", "risk_rules/fainting_rule"],
          [("risk_rules/fainting_rule", "balance_notes/dx_orthostatic")],
          ["fainting"]),
    ]


def build_cases() -> list[dict]:
    cases = [case_chest(), case_abdomen(), case_cough(), case_headache(),
             case_joint(), case_dizziness()]
    for case in cases:
        script = ScriptedDialogue.from_dict(case["script"])
        positions, _marks = gold_boundaries_for_script(script)
        case["gold_boundaries"] = positions
    return cases


def write_suite(out_dir: str | Path) -> None:
    out = Path(out_dir)
    (out / "cases").mkdir(parents=True, exist_ok=True)
    (out / "schema.json").write_text(json.dumps(build_schema(), indent=1), encoding="utf-8")
    (out / "lexicon.json").write_text(json.dumps(_LEXICON, indent=1), encoding="utf-8")
    with open(out / "corpus.jsonl", "w", encoding="utf-8") as fh:
        for block in build_corpus():
            fh.write(json.dumps(block) + "\n")
    with open(out / "qrels.jsonl", "w", encoding="utf-8") as fh:
        for entry in build_qrels():
            fh.write(json.dumps(entry) + "\n")
    # Gold annotations also ship as one shared JSONL keyed by case_id
    # (the cases embed the same events; this is the flat audit view).
    with open(out / "gold_events.jsonl", "w", encoding="utf-8") as fh:
        for case in build_cases():
            for ev in case["gold_events"]:
                fh.write(json.dumps({"case_id": case["case_id"], **ev,
                                     "source_span": [0, 0], "confidence": 1.0}) + "\n")
    (out / "config.default.json").write_text(json.dumps(DEFAULT_CONFIG, indent=1), encoding="utf-8")
    for case in build_cases():
        path = out / "cases" / f"{case['case_id']}.json"
        path.write_text(json.dumps(case, indent=1), encoding="utf-8")
