//! Relational data model: schemas, databases over interned elements,
//! pointed databases, example sets and direct products.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Structural identity of a domain element.
///
/// A base constant is an element with a single component. An element of a
/// direct product is the flat concatenation of its factors' components in
/// factor order, so equality and ordering are componentwise.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element(Box<[Arc<str>]>);

impl Element {
    pub fn constant(name: impl Into<Arc<str>>) -> Self {
        Element(Box::new([name.into()]))
    }

    /// Panics if `parts` is empty.
    pub fn from_parts(parts: Vec<Arc<str>>) -> Self {
        assert!(!parts.is_empty(), "an element has at least one component");
        Element(parts.into_boxed_slice())
    }

    /// Flattens the given elements into one product element.
    pub fn combine<'a>(components: impl IntoIterator<Item = &'a Element>) -> Self {
        let parts: Vec<Arc<str>> = components
            .into_iter()
            .flat_map(|e| e.0.iter().cloned())
            .collect();
        Element::from_parts(parts)
    }

    pub fn width(&self) -> usize {
        self.0.len()
    }

    pub fn parts(&self) -> &[Arc<str>] {
        &self.0
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            return f.write_str(&self.0[0]);
        }
        f.write_str("(")?;
        for (i, part) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(part)?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<&str> for Element {
    fn from(name: &str) -> Self {
        Element::constant(name)
    }
}

/// Returns the component of `element` at flat position `coordinate`.
pub fn projection(element: &Element, coordinate: usize) -> Result<Element> {
    element
        .0
        .get(coordinate)
        .map(|part| Element::constant(part.clone()))
        .ok_or(Error::Coordinate {
            coordinate,
            width: element.width(),
        })
}

/// Interned handle of an element inside one database (or graph).
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElemId(pub u32);

impl ElemId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelId(pub u32);

impl RelId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Relation symbols with their arities, kept in name order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Schema {
    names: Vec<Arc<str>>,
    arities: Vec<usize>,
}

impl Schema {
    pub fn new<I, S>(relations: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: AsRef<str>,
    {
        let mut map: BTreeMap<String, usize> = BTreeMap::new();
        for (name, arity) in relations {
            let name = name.as_ref();
            if arity == 0 {
                return Err(Error::ZeroArity(name.to_owned()));
            }
            match map.get(name) {
                Some(&expected) if expected != arity => {
                    return Err(Error::ArityConflict {
                        relation: name.to_owned(),
                        expected,
                        found: arity,
                    })
                }
                _ => {
                    map.insert(name.to_owned(), arity);
                }
            }
        }
        Ok(Schema {
            names: map.keys().map(|k| Arc::from(k.as_str())).collect(),
            arities: map.values().copied().collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn relation(&self, name: &str) -> Option<RelId> {
        self.names
            .binary_search_by(|n| n.as_ref().cmp(name))
            .ok()
            .map(|i| RelId(i as u32))
    }

    pub fn name(&self, rel: RelId) -> &str {
        &self.names[rel.index()]
    }

    pub fn arity(&self, rel: RelId) -> usize {
        self.arities[rel.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (RelId, &str, usize)> + '_ {
        self.names
            .iter()
            .zip(&self.arities)
            .enumerate()
            .map(|(i, (n, &a))| (RelId(i as u32), n.as_ref(), a))
    }

    /// True when every relation name shared by both schemas has the same arity.
    pub fn compatible_with(&self, other: &Schema) -> bool {
        self.iter().all(|(_, name, arity)| {
            other
                .relation(name)
                .is_none_or(|rel| other.arity(rel) == arity)
        })
    }

    /// For each relation of `self`, the relation of `other` with the same name.
    pub(crate) fn translate_to(&self, other: &Schema) -> Result<Vec<Option<RelId>>> {
        if !self.compatible_with(other) {
            return Err(Error::SchemaMismatch);
        }
        Ok(self.names.iter().map(|n| other.relation(n)).collect())
    }
}

/// An ordered sequence of elements of one database.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tuple(pub Vec<ElemId>);

impl Tuple {
    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = ElemId> + '_ {
        self.0.iter().copied()
    }
}

impl std::ops::Deref for Tuple {
    type Target = [ElemId];

    fn deref(&self) -> &[ElemId] {
        &self.0
    }
}

impl From<Vec<ElemId>> for Tuple {
    fn from(v: Vec<ElemId>) -> Self {
        Tuple(v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub rel: RelId,
    pub args: Box<[ElemId]>,
}

/// A finite set of atoms. The domain is exactly the set of elements that
/// occur in some atom, interned in element order.
#[derive(Clone)]
pub struct Database {
    schema: Schema,
    elements: Vec<Element>,
    index: HashMap<Element, ElemId>,
    atoms: Vec<Atom>,
    facts: Vec<HashSet<Box<[ElemId]>>>,
    occurrences: Vec<Vec<usize>>,
}

impl Database {
    pub fn empty(schema: Schema) -> Self {
        Self::assemble(schema, Vec::new(), Vec::new())
    }

    /// Builds a database from atoms over named elements.
    pub fn new<I, R>(schema: Schema, atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (R, Vec<Element>)>,
        R: AsRef<str>,
    {
        let mut local: HashMap<Element, u32> = HashMap::new();
        let mut elements = Vec::new();
        let mut raw = Vec::new();
        for (name, args) in atoms {
            let name = name.as_ref();
            let rel = schema.relation(name).ok_or(Error::SchemaMismatch)?;
            if schema.arity(rel) != args.len() {
                return Err(Error::ArityConflict {
                    relation: name.to_owned(),
                    expected: schema.arity(rel),
                    found: args.len(),
                });
            }
            let ids = args
                .into_iter()
                .map(|e| {
                    *local.entry(e.clone()).or_insert_with(|| {
                        elements.push(e);
                        (elements.len() - 1) as u32
                    })
                })
                .collect::<Vec<_>>();
            raw.push((rel, ids));
        }
        Ok(Self::from_raw(schema, elements, raw).0)
    }

    /// Builds a database from `(relation, [constant, ...])` facts, inferring
    /// the schema.
    pub fn from_facts<I, R, A, S>(facts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (R, A)>,
        R: AsRef<str>,
        A: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let facts: Vec<(String, Vec<Element>)> = facts
            .into_iter()
            .map(|(r, args)| {
                (
                    r.as_ref().to_owned(),
                    args.into_iter()
                        .map(|s| Element::constant(s.as_ref()))
                        .collect(),
                )
            })
            .collect();
        let schema = Schema::new(facts.iter().map(|(r, a)| (r.as_str(), a.len())))?;
        Database::new(schema, facts)
    }

    /// Interns `elements` in sorted order and returns the remapping from the
    /// caller's local ids to the final ones. Elements not mentioned by any
    /// atom are dropped (their entry in the remapping is `None`).
    pub(crate) fn from_raw(
        schema: Schema,
        elements: Vec<Element>,
        raw: Vec<(RelId, Vec<u32>)>,
    ) -> (Self, Vec<Option<ElemId>>) {
        let mut used = vec![false; elements.len()];
        for (_, args) in &raw {
            for &a in args {
                used[a as usize] = true;
            }
        }
        let mut order: Vec<u32> = (0..elements.len() as u32)
            .filter(|&i| used[i as usize])
            .collect();
        order.sort_by(|&a, &b| elements[a as usize].cmp(&elements[b as usize]));
        let mut remap = vec![None; elements.len()];
        for (new, &old) in order.iter().enumerate() {
            remap[old as usize] = Some(ElemId(new as u32));
        }
        let mut elements: Vec<Option<Element>> = elements.into_iter().map(Some).collect();
        let sorted: Vec<Element> = order
            .iter()
            .map(|&old| elements[old as usize].take().expect("each element is used once"))
            .collect();
        let atoms = raw
            .into_iter()
            .map(|(rel, args)| Atom {
                rel,
                args: args
                    .into_iter()
                    .map(|a| remap[a as usize].expect("atom elements are kept"))
                    .collect(),
            })
            .collect();
        (Self::assemble(schema, sorted, atoms), remap)
    }

    fn assemble(schema: Schema, elements: Vec<Element>, mut atoms: Vec<Atom>) -> Self {
        atoms.sort();
        atoms.dedup();
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), ElemId(i as u32)))
            .collect();
        let mut facts = vec![HashSet::new(); schema.len()];
        let mut occurrences = vec![Vec::new(); elements.len()];
        for (i, atom) in atoms.iter().enumerate() {
            facts[atom.rel.index()].insert(atom.args.clone());
            for a in atom.args.iter() {
                let occ: &mut Vec<usize> = &mut occurrences[a.index()];
                if occ.last() != Some(&i) {
                    occ.push(i);
                }
            }
        }
        Database {
            schema,
            elements,
            index,
            atoms,
            facts,
            occurrences,
        }
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn domain_size(&self) -> usize {
        self.elements.len()
    }

    pub fn domain(&self) -> impl Iterator<Item = ElemId> {
        (0..self.elements.len() as u32).map(ElemId)
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn element(&self, id: ElemId) -> &Element {
        &self.elements[id.index()]
    }

    pub fn id_of(&self, element: &Element) -> Option<ElemId> {
        self.index.get(element).copied()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn contains(&self, rel: RelId, args: &[ElemId]) -> bool {
        self.facts
            .get(rel.index())
            .is_some_and(|set| set.contains(args))
    }

    /// Indices into [`Database::atoms`] of the atoms mentioning `id`.
    pub fn occurrences(&self, id: ElemId) -> &[usize] {
        &self.occurrences[id.index()]
    }

    /// Resolves constant names into a tuple of this database.
    pub fn tuple<S: AsRef<str>>(&self, names: &[S]) -> Result<Tuple> {
        names
            .iter()
            .map(|n| {
                self.id_of(&Element::constant(n.as_ref()))
                    .ok_or_else(|| Error::UnknownElement(n.as_ref().to_owned()))
            })
            .collect::<Result<Vec<_>>>()
            .map(Tuple)
    }

    pub fn tuple_names(&self, tuple: &Tuple) -> Vec<String> {
        tuple.iter().map(|e| self.element(e).to_string()).collect()
    }

    pub fn atom_string(&self, atom: &Atom) -> String {
        let args: Vec<String> = atom.args.iter().map(|&e| self.element(e).to_string()).collect();
        format!("{}({})", self.schema.name(atom.rel), args.join(","))
    }

    /// Atoms rendered over element names, for comparisons across databases.
    pub fn named_atoms(&self) -> BTreeSet<(String, Vec<Element>)> {
        self.atoms
            .iter()
            .map(|a| {
                (
                    self.schema.name(a.rel).to_owned(),
                    a.args.iter().map(|&e| self.element(e).clone()).collect(),
                )
            })
            .collect()
    }
}

impl PartialEq for Database {
    fn eq(&self, other: &Self) -> bool {
        self.schema == other.schema && self.elements == other.elements && self.atoms == other.atoms
    }
}

impl Eq for Database {}

impl fmt::Debug for Database {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set()
            .entries(self.atoms.iter().map(|a| self.atom_string(a)))
            .finish()
    }
}

/// One atom per line, in the `R(a,b)` input syntax.
impl fmt::Display for Database {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for atom in &self.atoms {
            writeln!(f, "{}", self.atom_string(atom))?;
        }
        Ok(())
    }
}

/// A database with a distinguished tuple of its elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointedDatabase {
    pub db: Arc<Database>,
    pub point: Tuple,
}

impl PointedDatabase {
    pub fn new(db: Arc<Database>, point: Tuple) -> Result<Self> {
        if let Some(bad) = point.iter().find(|e| e.index() >= db.domain_size()) {
            return Err(Error::ElementOutOfRange(bad.0));
        }
        Ok(PointedDatabase { db, point })
    }

    pub fn named<S: AsRef<str>>(db: Arc<Database>, names: &[S]) -> Result<Self> {
        let point = db.tuple(names)?;
        Ok(PointedDatabase { db, point })
    }

    pub fn arity(&self) -> usize {
        self.point.arity()
    }
}

/// Positive and negative examples of a common arity over one database.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExampleSets {
    arity: usize,
    positive: BTreeSet<Tuple>,
    negative: BTreeSet<Tuple>,
}

impl ExampleSets {
    pub fn new(
        domain_size: usize,
        positive: impl IntoIterator<Item = Tuple>,
        negative: impl IntoIterator<Item = Tuple>,
    ) -> Result<Self> {
        let positive: BTreeSet<Tuple> = positive.into_iter().collect();
        let negative: BTreeSet<Tuple> = negative.into_iter().collect();
        let arity = positive
            .iter()
            .next()
            .ok_or(Error::EmptyPositive)?
            .arity();
        if arity == 0 {
            return Err(Error::ZeroArityExamples);
        }
        for t in positive.iter().chain(&negative) {
            if t.arity() != arity {
                return Err(Error::TupleArity {
                    expected: arity,
                    found: t.arity(),
                });
            }
            if let Some(bad) = t.iter().find(|e| e.index() >= domain_size) {
                return Err(Error::ElementOutOfRange(bad.0));
            }
        }
        Ok(ExampleSets {
            arity,
            positive,
            negative,
        })
    }

    /// Examples for a definability question: positives only.
    pub fn positive_only(
        domain_size: usize,
        positive: impl IntoIterator<Item = Tuple>,
    ) -> Result<Self> {
        Self::new(domain_size, positive, std::iter::empty())
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn positive(&self) -> &BTreeSet<Tuple> {
        &self.positive
    }

    pub fn negative(&self) -> &BTreeSet<Tuple> {
        &self.negative
    }
}

/// A map between element ids of two databases (or graphs).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment(BTreeMap<ElemId, ElemId>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, src: ElemId) -> Option<ElemId> {
        self.0.get(&src).copied()
    }

    /// Returns false (and leaves the map unchanged) if `src` is already
    /// mapped elsewhere.
    pub fn bind(&mut self, src: ElemId, dst: ElemId) -> bool {
        match self.0.get(&src) {
            Some(&d) => d == dst,
            None => {
                self.0.insert(src, dst);
                true
            }
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ElemId, ElemId)> + '_ {
        self.0.iter().map(|(&a, &b)| (a, b))
    }

    pub fn apply(&self, tuple: &Tuple) -> Option<Tuple> {
        tuple.iter().map(|e| self.get(e)).collect::<Option<Vec<_>>>().map(Tuple)
    }

    /// Renders the map over element names.
    pub fn named(&self, src: &[Element], dst: &[Element]) -> BTreeMap<Element, Element> {
        self.iter()
            .map(|(a, b)| (src[a.index()].clone(), dst[b.index()].clone()))
            .collect()
    }
}

impl FromIterator<(ElemId, ElemId)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (ElemId, ElemId)>>(iter: I) -> Self {
        Assignment(iter.into_iter().collect())
    }
}

/// The direct product of a sequence of pointed databases.
#[derive(Clone, Debug)]
pub struct Product {
    database: Arc<Database>,
    point: Vec<Element>,
    point_ids: Option<Tuple>,
    coords: Vec<Box<[ElemId]>>,
}

impl Product {
    pub fn database(&self) -> &Arc<Database> {
        &self.database
    }

    /// The product of the factor points, which need not lie in the domain.
    pub fn point_elements(&self) -> &[Element] {
        &self.point
    }

    /// Every element of the product point occurs in some product atom.
    pub fn is_safe(&self) -> bool {
        self.point_ids.is_some()
    }

    pub fn pointed(&self) -> Option<PointedDatabase> {
        self.point_ids.as_ref().map(|p| PointedDatabase {
            db: self.database.clone(),
            point: p.clone(),
        })
    }

    pub fn factor_count(&self) -> usize {
        self.coords.first().map_or(0, |c| c.len())
    }

    /// Factor-local ids of a product element, one per factor.
    pub fn coordinates(&self, id: ElemId) -> &[ElemId] {
        &self.coords[id.index()]
    }

    /// The coordinate-`factor` projection as a map into that factor.
    pub fn projection_map(&self, factor: usize) -> Assignment {
        self.coords
            .iter()
            .enumerate()
            .map(|(i, c)| (ElemId(i as u32), c[factor]))
            .collect()
    }
}

/// Odometer step over `pick[i] < lens[i]`; false once every combination was seen.
pub(crate) fn advance(pick: &mut [usize], lens: &[usize]) -> bool {
    for i in (0..pick.len()).rev() {
        pick[i] += 1;
        if pick[i] < lens[i] {
            return true;
        }
        pick[i] = 0;
    }
    false
}

/// Direct product of pointed databases over one schema.
pub fn product(factors: &[PointedDatabase]) -> Result<Product> {
    let first = factors.first().ok_or(Error::EmptyProduct)?;
    let schema = first.db.schema();
    let arity = first.point.arity();
    for f in factors {
        if f.db.schema() != schema {
            return Err(Error::SchemaMismatch);
        }
        if f.point.arity() != arity {
            return Err(Error::TupleArity {
                expected: arity,
                found: f.point.arity(),
            });
        }
    }

    if factors.len() == 1 {
        let db = first.db.clone();
        return Ok(Product {
            point: first.point.iter().map(|e| db.element(e).clone()).collect(),
            point_ids: Some(first.point.clone()),
            coords: db.domain().map(|e| Box::from([e])).collect(),
            database: db,
        });
    }

    let mut interned: HashMap<Box<[ElemId]>, u32> = HashMap::new();
    let mut coords: Vec<Box<[ElemId]>> = Vec::new();
    let mut intern = |c: Box<[ElemId]>| -> u32 {
        if let Some(&id) = interned.get(&c) {
            return id;
        }
        let id = coords.len() as u32;
        coords.push(c.clone());
        interned.insert(c, id);
        id
    };

    let mut raw = Vec::new();
    for (rel, _, rel_arity) in schema.iter() {
        let lists: Vec<Vec<&Atom>> = factors
            .iter()
            .map(|f| f.db.atoms().iter().filter(|a| a.rel == rel).collect())
            .collect();
        if lists.iter().any(|l| l.is_empty()) {
            continue;
        }
        let lens: Vec<usize> = lists.iter().map(Vec::len).collect();
        // odometer over one atom per factor
        let mut pick = vec![0usize; factors.len()];
        loop {
            let args = (0..rel_arity)
                .map(|j| {
                    let c: Box<[ElemId]> = pick
                        .iter()
                        .enumerate()
                        .map(|(i, &p)| lists[i][p].args[j])
                        .collect();
                    intern(c)
                })
                .collect::<Vec<_>>();
            raw.push((rel, args));
            if !advance(&mut pick, &lens) {
                break;
            }
        }
    }

    let name_of = |c: &[ElemId]| {
        Element::combine(c.iter().enumerate().map(|(i, &e)| factors[i].db.element(e)))
    };
    let elements: Vec<Element> = coords.iter().map(|c| name_of(c)).collect();
    let (database, remap) = Database::from_raw(schema.clone(), elements, raw);
    let mut final_coords = vec![Box::<[ElemId]>::default(); database.domain_size()];
    for (old, c) in coords.into_iter().enumerate() {
        if let Some(new) = remap[old] {
            final_coords[new.index()] = c;
        }
    }

    let point_coords: Vec<Box<[ElemId]>> = (0..arity)
        .map(|j| factors.iter().map(|f| f.point[j]).collect())
        .collect();
    let point: Vec<Element> = point_coords.iter().map(|c| name_of(c)).collect();
    let point_ids = point
        .iter()
        .map(|e| database.id_of(e))
        .collect::<Option<Vec<_>>>()
        .map(Tuple);

    Ok(Product {
        database: Arc::new(database),
        point,
        point_ids,
        coords: final_coords,
    })
}
