//! File-backed artwork store.
//!
//! Layout under the data directory:
//!
//! ```text
//! payloads/<uuid>.gstb      one immutable file per artwork
//! payloads/<uuid>.gstb.tmp  in-flight write, never read
//! index.log                 JSON lines, {"op":"put",..} / {"op":"del",..}
//! ```
//!
//! A put writes the temp file, syncs it, renames it into place, syncs the
//! directory and only then appends to the index. On open the index is
//! replayed, checked against the payload files and rewritten compacted.
//! Payload files without an index entry are adopted when they decode, so a
//! crash between rename and index append loses nothing.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Mutex;

use gesto_core::artwork::{decode, DecodeError};
use serde::{Deserialize, Serialize};
use uuid::Uuid;

const PAYLOAD_DIR: &str = "payloads";
const INDEX_FILE: &str = "index.log";
const PAYLOAD_EXT: &str = "gstb";
const TMP_EXT: &str = "gstb.tmp";

/// Metadata row kept for every stored artwork.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtworkRecord {
    pub artwork_id: Uuid,
    pub byte_len: u64,
    pub created_at: i64,
    pub author: String,
    pub title: String,
    #[serde(with = "hex_u32")]
    pub checksum: u32,
}

impl ArtworkRecord {
    fn for_payload(bytes: &[u8]) -> Result<Self, DecodeError> {
        let art = decode(bytes)?;
        Ok(Self {
            artwork_id: art.artwork_id,
            byte_len: bytes.len() as u64,
            created_at: art.created_at(),
            author: art.author().to_owned(),
            title: art.title().to_owned(),
            checksum: crc32fast::hash(bytes),
        })
    }

    /// Sort key for listings: newest first, then id ascending.
    pub fn order_key(&self) -> (std::cmp::Reverse<i64>, Uuid) {
        (std::cmp::Reverse(self.created_at), self.artwork_id)
    }
}

mod hex_u32 {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u32, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{v:08x}"))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u32, D::Error> {
        let s = String::deserialize(d)?;
        u32::from_str_radix(&s, 16).map_err(de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
enum IndexEntry {
    Put(ArtworkRecord),
    Del { artwork_id: Uuid },
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error("artwork {0} already exists")]
    Conflict(Uuid),
    #[error("artwork {0} not found")]
    NotFound(Uuid),
    #[error("storage i/o: {0}")]
    Io(#[from] io::Error),
    #[error("store halted after an injected crash")]
    Crashed,
}

/// Points at which a put can be made to fail as if the process died.
///
/// Used by tests to check that an interrupted write never becomes visible
/// as a partial payload.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrashPoint {
    /// Stop after this many payload bytes reached the temp file.
    PayloadBytes(usize),
    BeforeSync,
    BeforeRename,
    AfterRename,
    /// Stop after this many bytes of the index line were appended.
    IndexBytes(usize),
}

impl CrashPoint {
    /// Twenty distinct crash points spread across one put of `payload`:
    /// ten inside the temp-file write, the three file-system steps, and
    /// seven inside the index append. Every point interrupts the put.
    pub fn sweep(payload: &[u8]) -> Result<Vec<CrashPoint>, DecodeError> {
        let record = ArtworkRecord::for_payload(payload)?;
        let line = serde_json::to_vec(&IndexEntry::Put(record)).expect("record serializes").len() + 1;
        let p = payload.len();
        let mut points: Vec<CrashPoint> = (0..10).map(|i| CrashPoint::PayloadBytes(i * p / 10)).collect();
        points.extend([CrashPoint::BeforeSync, CrashPoint::BeforeRename, CrashPoint::AfterRename]);
        points.extend((0..7).map(|i| CrashPoint::IndexBytes(i * line / 7)));
        Ok(points)
    }
}

enum Slot {
    /// A put for this id is in flight.
    Reserved,
    Live(ArtworkRecord),
}

pub struct Store {
    root: PathBuf,
    slots: Mutex<HashMap<Uuid, Slot>>,
    index: Mutex<File>,
    crash_at: Mutex<Option<CrashPoint>>,
    crashed: AtomicBool,
}

/// What `Store::open` found and repaired.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Recovery {
    pub records: usize,
    pub adopted: usize,
    pub dropped: usize,
    pub temp_files_removed: usize,
}

impl Store {
    pub fn open(root: impl AsRef<Path>) -> Result<Self, StoreError> {
        Self::open_with_report(root).map(|(s, _)| s)
    }

    pub fn open_with_report(root: impl AsRef<Path>) -> Result<(Self, Recovery), StoreError> {
        let root = root.as_ref().to_path_buf();
        let payloads = root.join(PAYLOAD_DIR);
        fs::create_dir_all(&payloads)?;
        let mut report = Recovery::default();

        // Replay the log. A torn final line (or any unreadable line) is skipped.
        let mut records: HashMap<Uuid, ArtworkRecord> = HashMap::new();
        if let Ok(file) = File::open(root.join(INDEX_FILE)) {
            for line in BufReader::new(file).lines() {
                let Ok(line) = line else { break };
                match serde_json::from_str::<IndexEntry>(&line) {
                    Ok(IndexEntry::Put(r)) => {
                        records.insert(r.artwork_id, r);
                    }
                    Ok(IndexEntry::Del { artwork_id }) => {
                        records.remove(&artwork_id);
                    }
                    Err(e) => tracing::warn!(error = %e, "skipping unreadable index line"),
                }
            }
        }

        let mut on_disk: HashMap<Uuid, PathBuf> = HashMap::new();
        for entry in fs::read_dir(&payloads)? {
            let path = entry?.path();
            let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default().to_owned();
            if name.ends_with(&format!(".{TMP_EXT}")) {
                fs::remove_file(&path)?;
                report.temp_files_removed += 1;
            } else if let Some(id) = name.strip_suffix(&format!(".{PAYLOAD_EXT}")).and_then(|s| Uuid::parse_str(s).ok()) {
                on_disk.insert(id, path);
            }
        }

        let mut live = HashMap::new();
        for (id, path) in on_disk {
            let bytes = fs::read(&path)?;
            let checked = match records.remove(&id) {
                Some(r) if r.byte_len == bytes.len() as u64 && r.checksum == crc32fast::hash(&bytes) => Some(r),
                _ => match ArtworkRecord::for_payload(&bytes) {
                    Ok(r) if r.artwork_id == id => {
                        report.adopted += 1;
                        Some(r)
                    }
                    _ => None,
                },
            };
            match checked {
                Some(r) => {
                    live.insert(id, Slot::Live(r));
                }
                None => {
                    tracing::warn!(%id, "removing unreadable payload");
                    fs::remove_file(&path)?;
                    report.dropped += 1;
                }
            }
        }
        // Records whose payload never made it to disk.
        report.dropped += records.len();
        report.records = live.len();

        // Compact: rewrite the index with one put per live record.
        let mut compact = Vec::new();
        let mut ordered: Vec<&ArtworkRecord> = live
            .values()
            .filter_map(|s| match s {
                Slot::Live(r) => Some(r),
                Slot::Reserved => None,
            })
            .collect();
        ordered.sort_by_key(|r| r.order_key());
        for r in ordered {
            compact.extend(serde_json::to_vec(&IndexEntry::Put(r.clone())).expect("record serializes"));
            compact.push(b'\n');
        }
        let index_path = root.join(INDEX_FILE);
        let tmp = root.join(format!("{INDEX_FILE}.tmp"));
        {
            let mut f = File::create(&tmp)?;
            f.write_all(&compact)?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &index_path)?;
        sync_dir(&root)?;

        let index = OpenOptions::new().append(true).open(&index_path)?;
        let store = Self {
            root,
            slots: Mutex::new(live),
            index: Mutex::new(index),
            crash_at: Mutex::new(None),
            crashed: AtomicBool::new(false),
        };
        Ok((store, report))
    }

    /// Arms a one-shot simulated crash for the next put.
    pub fn arm_crash(&self, point: CrashPoint) {
        *self.crash_at.lock().unwrap() = Some(point);
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn payload_path(&self, id: Uuid) -> PathBuf {
        self.root.join(PAYLOAD_DIR).join(format!("{}.{PAYLOAD_EXT}", id.hyphenated()))
    }

    fn tmp_path(&self, id: Uuid) -> PathBuf {
        self.root.join(PAYLOAD_DIR).join(format!("{}.{TMP_EXT}", id.hyphenated()))
    }

    fn check_alive(&self) -> Result<(), StoreError> {
        if self.crashed.load(Ordering::SeqCst) {
            Err(StoreError::Crashed)
        } else {
            Ok(())
        }
    }

    /// Returns Err when the armed crash point is `point`.
    fn crash_if(&self, point: CrashPoint) -> Result<(), StoreError> {
        let mut armed = self.crash_at.lock().unwrap();
        if *armed == Some(point) {
            *armed = None;
            self.crashed.store(true, Ordering::SeqCst);
            return Err(StoreError::Crashed);
        }
        Ok(())
    }

    /// Byte budget before a simulated crash while writing, if one is armed.
    fn byte_budget(&self, index: bool) -> Option<usize> {
        match *self.crash_at.lock().unwrap() {
            Some(CrashPoint::PayloadBytes(n)) if !index => Some(n),
            Some(CrashPoint::IndexBytes(n)) if index => Some(n),
            _ => None,
        }
    }

    fn write_with_budget(&self, file: &mut File, bytes: &[u8], index: bool) -> Result<(), StoreError> {
        match self.byte_budget(index) {
            Some(n) if n < bytes.len() => {
                file.write_all(&bytes[..n])?;
                file.flush()?;
                *self.crash_at.lock().unwrap() = None;
                self.crashed.store(true, Ordering::SeqCst);
                Err(StoreError::Crashed)
            }
            _ => Ok(file.write_all(bytes)?),
        }
    }

    /// Stores a GSTB payload under the id it carries.
    pub fn put(&self, bytes: &[u8]) -> Result<ArtworkRecord, StoreError> {
        self.check_alive()?;
        let record = ArtworkRecord::for_payload(bytes)?;
        let id = record.artwork_id;
        {
            let mut slots = self.slots.lock().unwrap();
            if slots.contains_key(&id) {
                return Err(StoreError::Conflict(id));
            }
            slots.insert(id, Slot::Reserved);
        }
        match self.write_payload(&record, bytes) {
            Ok(()) => {
                self.slots.lock().unwrap().insert(id, Slot::Live(record.clone()));
                Ok(record)
            }
            Err(e) => {
                if !self.crashed.load(Ordering::SeqCst) {
                    let _ = fs::remove_file(self.tmp_path(id));
                    let _ = fs::remove_file(self.payload_path(id));
                }
                self.slots.lock().unwrap().remove(&id);
                Err(e)
            }
        }
    }

    fn write_payload(&self, record: &ArtworkRecord, bytes: &[u8]) -> Result<(), StoreError> {
        let id = record.artwork_id;
        let tmp = self.tmp_path(id);
        let mut file = File::create(&tmp)?;
        self.write_with_budget(&mut file, bytes, false)?;
        self.crash_if(CrashPoint::BeforeSync)?;
        file.sync_all()?;
        drop(file);
        self.crash_if(CrashPoint::BeforeRename)?;
        fs::rename(&tmp, self.payload_path(id))?;
        sync_dir(&self.root.join(PAYLOAD_DIR))?;
        self.crash_if(CrashPoint::AfterRename)?;
        self.append_index(&IndexEntry::Put(record.clone()))
    }

    fn append_index(&self, entry: &IndexEntry) -> Result<(), StoreError> {
        let mut line = serde_json::to_vec(entry).expect("index entry serializes");
        line.push(b'\n');
        let mut index = self.index.lock().unwrap();
        let before = index.metadata()?.len();
        let result = self.write_with_budget(&mut index, &line, true).and_then(|()| Ok(index.sync_data()?));
        if result.is_err() && !self.crashed.load(Ordering::SeqCst) {
            // Keep the log line-aligned for later appends.
            let _ = index.set_len(before);
        }
        result
    }

    pub fn get(&self, id: Uuid) -> Result<(ArtworkRecord, Vec<u8>), StoreError> {
        let record = self.record(id).ok_or(StoreError::NotFound(id))?;
        match fs::read(self.payload_path(id)) {
            Ok(bytes) => Ok((record, bytes)),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Err(StoreError::NotFound(id)),
            Err(e) => Err(e.into()),
        }
    }

    pub fn record(&self, id: Uuid) -> Option<ArtworkRecord> {
        match self.slots.lock().unwrap().get(&id) {
            Some(Slot::Live(r)) => Some(r.clone()),
            _ => None,
        }
    }

    /// Removes an artwork. The payload goes first so a crash in between
    /// leaves a dangling index row (dropped on open), never a resurrected file.
    pub fn delete(&self, id: Uuid) -> Result<ArtworkRecord, StoreError> {
        self.check_alive()?;
        let record = {
            let mut slots = self.slots.lock().unwrap();
            match slots.get(&id) {
                Some(Slot::Live(r)) => {
                    let r = r.clone();
                    slots.insert(id, Slot::Reserved);
                    r
                }
                _ => return Err(StoreError::NotFound(id)),
            }
        };
        let result = fs::remove_file(self.payload_path(id))
            .map_err(StoreError::from)
            .and_then(|()| self.append_index(&IndexEntry::Del { artwork_id: id }));
        let mut slots = self.slots.lock().unwrap();
        match result {
            Ok(()) => {
                slots.remove(&id);
                Ok(record)
            }
            Err(e) => {
                if self.payload_path(id).exists() {
                    slots.insert(id, Slot::Live(record));
                } else {
                    slots.remove(&id);
                }
                Err(e)
            }
        }
    }

    /// All live records in listing order.
    pub fn records(&self) -> Vec<ArtworkRecord> {
        let mut out: Vec<ArtworkRecord> = self
            .slots
            .lock()
            .unwrap()
            .values()
            .filter_map(|s| match s {
                Slot::Live(r) => Some(r.clone()),
                Slot::Reserved => None,
            })
            .collect();
        out.sort_by_key(|r| r.order_key());
        out
    }

    pub fn len(&self) -> usize {
        self.slots.lock().unwrap().values().filter(|s| matches!(s, Slot::Live(_))).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Re-reads every payload and returns the ids whose bytes no longer
    /// match their record.
    pub fn scrub(&self) -> Vec<Uuid> {
        self.records()
            .into_iter()
            .filter(|r| match fs::read(self.payload_path(r.artwork_id)) {
                Ok(bytes) => bytes.len() as u64 != r.byte_len || crc32fast::hash(&bytes) != r.checksum,
                Err(_) => true,
            })
            .map(|r| r.artwork_id)
            .collect()
    }
}

fn sync_dir(dir: &Path) -> io::Result<()> {
    File::open(dir)?.sync_all()
}
