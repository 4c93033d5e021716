//! Bundled mini-corpus for the translation tasks.

/// Argument frames a verb may appear in.
pub mod frame {
    pub const TRANSITIVE: u8 = 1;
    pub const UNERGATIVE: u8 = 2;
    pub const UNACCUSATIVE: u8 = 4;
    pub const CCOMP: u8 = 8;
    pub const DATIVE: u8 = 16;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Verb {
    pub lemma: &'static str,
    pub past: &'static str,
    pub participle: &'static str,
    pub frames: u8,
}

impl Verb {
    pub fn allows(&self, f: u8) -> bool {
        self.frames & f != 0
    }
}

const fn v(lemma: &'static str, past: &'static str, participle: &'static str, frames: u8) -> Verb {
    Verb {
        lemma,
        past,
        participle,
        frames,
    }
}

use frame::*;

pub const VERBS: &[Verb] = &[
    v("admire", "admired", "admired", TRANSITIVE | CCOMP),
    v(
        "appreciate",
        "appreciated",
        "appreciated",
        TRANSITIVE | CCOMP,
    ),
    v("bake", "baked", "baked", TRANSITIVE),
    v("believe", "believed", "believed", CCOMP),
    v("break", "broke", "broken", TRANSITIVE | UNACCUSATIVE),
    v("bring", "brought", "brought", DATIVE),
    v("burn", "burned", "burned", TRANSITIVE | UNACCUSATIVE),
    v("carry", "carried", "carried", TRANSITIVE),
    v("claim", "claimed", "claimed", CCOMP),
    v("clean", "cleaned", "cleaned", TRANSITIVE),
    v("collapse", "collapsed", "collapsed", UNACCUSATIVE),
    v("cough", "coughed", "coughed", UNERGATIVE),
    v("crush", "crushed", "crushed", TRANSITIVE),
    v("dance", "danced", "danced", UNERGATIVE),
    v("decompose", "decomposed", "decomposed", UNACCUSATIVE),
    v(
        "disintegrate",
        "disintegrated",
        "disintegrated",
        UNACCUSATIVE,
    ),
    v("draw", "drew", "drawn", TRANSITIVE),
    v("dream", "dreamed", "dreamed", CCOMP),
    v("eat", "ate", "eaten", TRANSITIVE | UNERGATIVE),
    v("expect", "expected", "expected", CCOMP),
    v("find", "found", "found", TRANSITIVE),
    v("freeze", "froze", "frozen", TRANSITIVE | UNACCUSATIVE),
    v("give", "gave", "given", DATIVE),
    v("grow", "grew", "grown", UNACCUSATIVE),
    v("hand", "handed", "handed", DATIVE),
    v("hear", "heard", "heard", CCOMP),
    v("help", "helped", "helped", TRANSITIVE),
    v("hold", "held", "held", TRANSITIVE),
    v("hope", "hoped", "hoped", CCOMP),
    v("imagine", "imagined", "imagined", CCOMP),
    v("inflate", "inflated", "inflated", TRANSITIVE),
    v("jog", "jogged", "jogged", UNERGATIVE),
    v("kick", "kicked", "kicked", TRANSITIVE),
    v("know", "knew", "known", CCOMP),
    v("laugh", "laughed", "laughed", UNERGATIVE),
    v("lend", "lent", "lent", DATIVE),
    v("like", "liked", "liked", TRANSITIVE | CCOMP),
    v("love", "loved", "loved", TRANSITIVE | CCOMP),
    v("mail", "mailed", "mailed", DATIVE),
    v("melt", "melted", "melted", UNACCUSATIVE),
    v("notice", "noticed", "noticed", TRANSITIVE | CCOMP),
    v("offer", "offered", "offered", DATIVE),
    v("paint", "painted", "painted", TRANSITIVE),
    v("pass", "passed", "passed", DATIVE),
    v("prefer", "preferred", "preferred", CCOMP),
    v("pull", "pulled", "pulled", TRANSITIVE),
    v("push", "pushed", "pushed", TRANSITIVE),
    v("respect", "respected", "respected", TRANSITIVE | CCOMP),
    v("roll", "rolled", "rolled", TRANSITIVE | UNACCUSATIVE),
    v("run", "ran", "run", UNERGATIVE),
    v("say", "said", "said", CCOMP),
    v("scream", "screamed", "screamed", UNERGATIVE),
    v("sell", "sold", "sold", DATIVE),
    v("send", "sent", "sent", DATIVE),
    v(
        "shatter",
        "shattered",
        "shattered",
        TRANSITIVE | UNACCUSATIVE,
    ),
    v("show", "showed", "shown", DATIVE),
    v("sleep", "slept", "slept", UNERGATIVE),
    v("smile", "smiled", "smiled", UNERGATIVE),
    v("sneeze", "sneezed", "sneezed", UNERGATIVE),
    v("squeeze", "squeezed", "squeezed", TRANSITIVE),
    v("think", "thought", "thought", CCOMP),
    v("touch", "touched", "touched", TRANSITIVE),
    v("value", "valued", "valued", TRANSITIVE | CCOMP),
    v("walk", "walked", "walked", UNERGATIVE),
    v("yawn", "yawned", "yawned", UNERGATIVE),
];

/// Common nouns that can act (agents, recipients).
pub const ANIMATE: &[&str] = &[
    "baby",
    "bear",
    "bird",
    "boy",
    "captain",
    "cat",
    "chef",
    "chicken",
    "child",
    "cockroach",
    "cow",
    "doctor",
    "dog",
    "driver",
    "duck",
    "farmer",
    "fox",
    "frog",
    "girl",
    "goat",
    "hedgehog",
    "horse",
    "king",
    "lawyer",
    "lion",
    "monkey",
    "mouse",
    "nurse",
    "penguin",
    "pig",
    "prince",
    "princess",
    "queen",
    "rabbit",
    "sheep",
    "soldier",
    "student",
    "teacher",
    "tiger",
    "wolf",
];

/// Common nouns for things and places.
pub const INANIMATE: &[&str] = &[
    "apple", "bag", "ball", "basket", "bed", "boat", "book", "bottle", "bowl", "box", "cake",
    "car", "chair", "cookie", "cup", "desk", "donut", "drawer", "garden", "hat", "house", "jar",
    "pencil", "pillow", "pizza", "plate", "ring", "room", "rose", "sandwich", "shoe", "stage",
    "table", "tray", "tree",
];

pub const PROPER: &[&str] = &[
    "Aiden",
    "Ava",
    "Charlotte",
    "Ella",
    "Emma",
    "Grace",
    "Henry",
    "James",
    "Leo",
    "Liam",
    "Lucas",
    "Luna",
    "Mia",
    "Noah",
    "Oliver",
    "Olivia",
    "Samuel",
    "Savannah",
    "Sophia",
    "Zoe",
];

pub const RELATIONS: &[&str] = &[
    "in", "on", "beside", "near", "under", "behind", "above", "below",
];

pub fn verb(lemma: &str) -> Option<&'static Verb> {
    VERBS.iter().find(|v| v.lemma == lemma)
}

pub fn verbs_with(f: u8) -> Vec<&'static Verb> {
    VERBS.iter().filter(|v| v.allows(f)).collect()
}

pub fn is_proper(noun: &str) -> bool {
    PROPER.contains(&noun)
}
