"""Synthetic doctor-patient dialogues for tests that need a large clean corpus."""

from __future__ import annotations

import random

from asrnoise.transcript import Dialogue, Turn

DOCTOR = [
    "Hello, what brings you in today?",
    "How long have you had the diarrhea?",
    "Have you noticed any white spots on the back of your throat?",
    "Are you taking any medication at the moment, like Tylenol or ibuprofen?",
    "Do you have any allergies that I should know about?",
    "And when you say diarrhea, do you mean loose stools or going more often?",
    "Has anyone else at home been unwell recently?",
    "Have you had a fever or any chills over the last few days?",
    "Is the pain constant or does it come and go?",
    "Where exactly is the pain, can you point to it?",
    "Have you been able to keep fluids down?",
    "I'd like to take your temperature and check your blood pressure.",
    "Any blood in the stool or black tarry stools?",
    "Okay, and how is your appetite been?",
    "I think this is most likely a viral gastroenteritis.",
    "Make sure you drink plenty of water and rest.",
    "If the symptoms get worse, please come back and see us.",
    "Have you travelled anywhere abroad recently?",
    "Do you smoke or drink alcohol?",
    "Any shortness of breath or chest pain?",
]
PATIENT = [
    "I just had some diarrhea for the last three days.",
    "Yeah, it's like loose and watery stool going to the toilet quite often.",
    "I took a Tylenol this morning but it didn't really help.",
    "No, just maybe my stomach, a bit of pain in my lower stomach.",
    "I've had a bit of a headache and I feel quite tired.",
    "Not really, maybe a mild fever last night.",
    "My throat is a bit sore and I have a dry cough.",
    "It comes and goes, it's worse after I eat.",
    "I'm allergic to penicillin, I think.",
    "My partner had something similar last week.",
    "I haven't been eating much, to be honest.",
    "I've been drinking water, I can keep that down.",
    "It's mostly on the right side, down here.",
    "I don't smoke, and I only drink at the weekend.",
    "No, nothing like that, my breathing is fine.",
    "Okay, thank you doctor, that makes sense.",
    "Should I take anything for the pain?",
    "I was in Spain about two weeks ago.",
    "It started on Monday after dinner.",
    "I feel a bit dizzy when I stand up quickly.",
]


def make_corpus(n_dialogues: int = 60, turns: int = 20, seed: int = 0, prefix: str = "d") -> list[Dialogue]:
    rng = random.Random(seed)
    out = []
    for d in range(n_dialogues):
        turn_list = []
        for t in range(turns):
            if t % 2 == 0:
                turn_list.append(Turn("doctor", rng.choice(DOCTOR)))
            else:
                turn_list.append(Turn("patient", rng.choice(PATIENT)))
        out.append(Dialogue(f"{prefix}{d:03d}", tuple(turn_list)))
    return out


def corrupt_corpus(clean, profile, seed: int):
    """Offline noisy copy of ``clean`` at ``profile``; used as a stand-in ASR corpus."""
    from asrnoise.generator import GenerationConfig, generate_corpus

    synthetic, _, _ = generate_corpus(clean, (), profile, GenerationConfig(master_seed=seed))
    return synthetic
